//! Energy and enstrophy balances evaluated on stored real-time snapshots.

use serde::{Deserialize, Serialize};

use super::integrator::TrajectoryRecord;
use super::setup::PhysicalSetup;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancePoint {
    pub t: f64,
    /// `d/dt |u|^2/2 + nu |A^{1/2}u|^2 - (g, u)`.
    pub energy: f64,
    /// `d/dt |A^{1/2}u|^2/2 + nu |Au|^2 - (g, Au)`.
    pub enstrophy: f64,
    pub energy_scale: f64,
    pub enstrophy_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceSeries {
    pub points: Vec<BalancePoint>,
}

impl BalanceSeries {
    /// Largest `|residual| / scale` over both balances.
    pub fn max_relative(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.energy.abs() / p.energy_scale).max(p.enstrophy.abs() / p.enstrophy_scale))
            .fold(0.0, f64::max)
    }

    pub fn max_absolute(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.energy.abs().max(p.enstrophy.abs()))
            .fold(0.0, f64::max)
    }
}

/// Residuals of both balances, with time derivatives taken by fourth-order
/// central differences over consecutive snapshots.
pub fn balance_monitor(traj: &TrajectoryRecord, setup: &PhysicalSetup) -> Result<BalanceSeries> {
    if traj.metadata.ray.theta != 0.0 {
        return Err(Error::InvalidArgument(
            "balances are defined on the real axis".into(),
        ));
    }
    let snaps = &traj.snapshots;
    if snaps.len() < 5 {
        return Err(Error::InvalidArgument(
            "need at least five snapshots".into(),
        ));
    }
    let dt = (snaps[1].zeta - snaps[0].zeta).re;
    for w in snaps.windows(2) {
        let d = (w[1].zeta - w[0].zeta).re;
        if (d - dt).abs() > 1e-9 * dt {
            return Err(Error::InvalidArgument(
                "snapshots are not equally spaced".into(),
            ));
        }
    }
    let nu = setup.nu();
    let g = setup.force();
    let mut energy = Vec::with_capacity(snaps.len());
    let mut enstrophy = Vec::with_capacity(snaps.len());
    for s in snaps {
        energy.push(0.5 * s.field.norm().powi(2));
        enstrophy.push(0.5 * s.field.sobolev_norm(1.0).powi(2));
    }
    let ddt = |x: &[f64], i: usize| {
        (-x[i + 2] + 8.0 * x[i + 1] - 8.0 * x[i - 1] + x[i - 2]) / (12.0 * dt)
    };
    let mut points = Vec::new();
    for i in 2..snaps.len() - 2 {
        let u = &snaps[i].field;
        let au = u.apply_power(1.0);
        let diss_e = nu * u.sobolev_norm(1.0).powi(2);
        let diss_z = nu * u.sobolev_norm(2.0).powi(2);
        let work_e = g.inner(u)?.re;
        let work_z = g.inner(&au)?.re;
        let de = ddt(&energy, i);
        let dz = ddt(&enstrophy, i);
        points.push(BalancePoint {
            t: snaps[i].zeta.re,
            energy: de + diss_e - work_e,
            enstrophy: dz + diss_z - work_z,
            energy_scale: de.abs() + diss_e + work_e.abs(),
            enstrophy_scale: dz.abs() + diss_z + work_z.abs(),
        });
    }
    Ok(BalanceSeries { points })
}

/// Excess of the sampled `|A^{s/2} u(t)|^2` over the pathwise bound
/// `e^{-nu kappa0^2 t} |A^{s/2} u(0)|^2 + (1 - e^{-nu kappa0^2 t}) nu^2 kappa0^{2s} G^2`,
/// relative to the initial value, maximized over samples. `s` is 0 (energy) or 1 (enstrophy).
pub fn decay_bound_excess(traj: &TrajectoryRecord, setup: &PhysicalSetup, s: f64) -> Result<f64> {
    let idx = traj
        .alpha_index(s)
        .ok_or_else(|| Error::InvalidArgument(format!("norm exponent {s} was not sampled")))?;
    if traj.metadata.ray.theta != 0.0 {
        return Err(Error::InvalidArgument(
            "decay bounds are stated on the real axis".into(),
        ));
    }
    let first = traj
        .samples
        .first()
        .ok_or_else(|| Error::Degenerate("empty trajectory".into()))?;
    let t0 = first.zeta.re;
    let x0 = first.norms[idx].powi(2);
    let cap = (setup.nu() * setup.kappa0().powf(s) * setup.grashof()).powi(2);
    let mut worst = f64::NEG_INFINITY;
    for smp in &traj.samples {
        let e = (-setup.rate() * (smp.zeta.re - t0)).exp();
        let bound = e * x0 + (1.0 - e) * cap;
        worst = worst.max((smp.norms[idx].powi(2) - bound) / x0.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}
