//! Numerical checks of the strip and sector bounds against integrated trajectories.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrator::{
    integrate_ray, integrate_real, IntegratorConfig, RaySpec, TrajectoryRecord,
};
use super::setup::{PhysicalSetup, SetupSummary};
use crate::error::{Error, Result};
use crate::ledger::{BoundTable, LedgerConstants, SectorRadii};
use crate::spectral::SpectralField;

/// Sweep parameters for [`verify_strip`]. Times are physical; `None` picks the default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StripOptions {
    /// Real-time preconditioning before the first anchor, `20 / (nu kappa0^2)` by default.
    pub transient: Option<f64>,
    pub anchors: usize,
    /// Real time between anchors, `1 / (nu kappa0^2)` by default.
    pub anchor_spacing: Option<f64>,
    pub thetas: Vec<f64>,
    pub alphas: Vec<usize>,
    /// Steps along each ray.
    pub ray_steps: usize,
    /// Relative slack on the real-axis bound.
    pub real_tolerance: f64,
    /// Real-time integrator settings; `IntegratorConfig::default_for` when absent.
    pub integrator: Option<IntegratorConfig>,
}

impl Default for StripOptions {
    fn default() -> Self {
        Self {
            transient: None,
            anchors: 8,
            anchor_spacing: None,
            thetas: angle_sweep(9),
            alphas: vec![1],
            ray_steps: 32,
            real_tolerance: 1e-3,
            integrator: None,
        }
    }
}

/// `n` equally spaced angles covering `[-pi/4, pi/4]`.
pub fn angle_sweep(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| -FRAC_PI_4 + 2.0 * FRAC_PI_4 * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// One comparison of a measured norm against its bound; `margin = bound / measured`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginPoint {
    pub t0: f64,
    pub theta: f64,
    pub rho: f64,
    pub re_zeta: f64,
    pub im_zeta: f64,
    pub alpha: usize,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
}

impl MarginPoint {
    fn new(t0: f64, theta: f64, rho: f64, alpha: usize, measured: f64, bound: f64) -> Self {
        let zeta = RaySpec {
            t0,
            theta,
            rho_end: rho,
        }
        .zeta(rho);
        let margin = if measured > 0.0 {
            bound / measured
        } else {
            f64::INFINITY
        };
        Self {
            t0,
            theta,
            rho,
            re_zeta: zeta.re,
            im_zeta: zeta.im,
            alpha,
            measured,
            bound,
            margin,
        }
    }
}

/// A point where a bound failed, with what is needed to rerun that ray.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub reason: String,
    pub ray: RaySpec,
    pub rho: f64,
    pub alpha: Option<usize>,
    pub measured: f64,
    pub bound: f64,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub setup: SetupSummary,
    pub table_mode: String,
    pub anchors: Vec<f64>,
    pub points: Vec<MarginPoint>,
    pub real_axis: Vec<MarginPoint>,
    pub min_margin: f64,
    pub min_real_margin: f64,
    pub counterexamples: Vec<Counterexample>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.min_margin >= 1.0 && self.min_real_margin >= 1.0
    }

    /// Real-axis points first (`theta = 0`, `rho` measured from the first anchor), then the rays.
    pub fn to_csv(&self) -> Result<String> {
        margin_csv(self.real_axis.iter().chain(&self.points))
    }
}

/// `re_zeta, im_zeta, theta, rho, alpha, norm_value, bound_value, margin` rows.
pub fn margin_csv<'a>(points: impl IntoIterator<Item = &'a MarginPoint>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "re_zeta",
        "im_zeta",
        "theta",
        "rho",
        "alpha",
        "norm_value",
        "bound_value",
        "margin",
    ])?;
    for p in points {
        w.write_record([
            format!("{:e}", p.re_zeta),
            format!("{:e}", p.im_zeta),
            format!("{:e}", p.theta),
            format!("{:e}", p.rho),
            p.alpha.to_string(),
            format!("{:e}", p.measured),
            format!("{:e}", p.bound),
            format!("{:e}", p.margin),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

fn fail_message(traj: &TrajectoryRecord, what: &str) -> Error {
    let f = traj.failure.as_ref().expect("failed trajectory");
    Error::IntegrationFailed(format!(
        "{what}: {:?} at step {} (rho = {:e}, |A^1/2 u| = {:e})",
        f.kind, f.step, f.rho, f.gradient_norm
    ))
}

/// Preconditions `u0` by a real transient, then compares `|A^{alpha/2} u|` with the
/// table on the real axis (`R_alpha`) and on rays `t0 + rho e^{i theta}`,
/// `rho <= sqrt2 delta_alpha`, from each anchor (`R~_alpha`).
pub fn verify_strip(
    u0: &SpectralField,
    setup: &PhysicalSetup,
    table: &BoundTable,
    opts: &StripOptions,
) -> Result<VerificationReport> {
    if opts.anchors == 0 || opts.ray_steps == 0 {
        return Err(Error::InvalidArgument(
            "need at least one anchor and one ray step".into(),
        ));
    }
    if opts.alphas.is_empty() {
        return Err(Error::InvalidArgument("no norm exponents requested".into()));
    }
    if let Some(&t) = opts
        .thetas
        .iter()
        .find(|t| t.abs() > FRAC_PI_4 * (1.0 + 1e-12))
    {
        return Err(Error::InvalidRay(t));
    }
    let rows = opts
        .alphas
        .iter()
        .map(|&a| {
            table
                .row(a)
                .ok_or_else(|| Error::InvalidArgument(format!("table has no row for alpha = {a}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let rate = setup.rate();
    let transient = opts.transient.unwrap_or(20.0 / rate);
    let spacing = opts.anchor_spacing.unwrap_or(1.0 / rate);
    if !(transient >= 0.0 && spacing > 0.0) {
        return Err(Error::InvalidArgument(
            "transient and anchor spacing must be nonnegative".into(),
        ));
    }
    let alphas: Vec<f64> = opts.alphas.iter().map(|&a| a as f64).collect();
    let base = opts
        .integrator
        .clone()
        .unwrap_or_else(|| IntegratorConfig::default_for(setup));

    let pre_cfg = IntegratorConfig {
        sample_every: usize::MAX,
        snapshot_every: None,
        ..base.clone()
    };
    let pre = integrate_real(u0, setup, transient, &pre_cfg)?;
    if !pre.completed() {
        return Err(fail_message(&pre, "transient"));
    }

    // Anchor phase: step size chosen so that every anchor falls on a step.
    let per_gap = (spacing / base.dt).ceil().max(1.0) as usize;
    let run_cfg = IntegratorConfig {
        dt: spacing / per_gap as f64,
        sample_every: 1,
        snapshot_every: Some(per_gap),
        alphas: alphas.clone(),
        ..base.clone()
    };
    let span = spacing * (opts.anchors - 1) as f64;
    let run = integrate_real(&pre.final_field, setup, span, &run_cfg)?;
    if !run.completed() {
        return Err(fail_message(&run, "anchor run"));
    }
    let mut counterexamples = Vec::new();
    let mut real_axis = Vec::new();
    for s in &run.samples {
        for (j, (&a, row)) in opts.alphas.iter().zip(&rows).enumerate() {
            let Some(r_ln) = row.r_sq_ln else { continue };
            let bound = (0.5 * r_ln).exp()
                * table.nu
                * table.kappa0.powi(a as i32)
                * (1.0 + opts.real_tolerance);
            let p = MarginPoint::new(transient, 0.0, s.rho, a, s.norms[j], bound);
            if p.margin < 1.0 {
                counterexamples.push(Counterexample {
                    reason: "real-axis bound exceeded".into(),
                    ray: RaySpec {
                        t0: 0.0,
                        theta: 0.0,
                        rho_end: transient + s.rho,
                    },
                    rho: transient + s.rho,
                    alpha: Some(a),
                    measured: p.measured,
                    bound: p.bound,
                    step: run_cfg.dt,
                });
            }
            real_axis.push(p);
        }
    }
    let anchors: Vec<(f64, &SpectralField)> = run
        .snapshots
        .iter()
        .map(|s| (transient + s.zeta.re - run.metadata.ray.t0, &s.field))
        .collect();

    let reach = rows.iter().map(|r| SQRT_2 * r.delta).fold(0.0, f64::max);
    let jobs: Vec<(f64, &SpectralField, f64)> = anchors
        .iter()
        .flat_map(|&(t0, f)| opts.thetas.iter().map(move |&th| (t0, f, th)))
        .collect();
    let results: Vec<(Vec<MarginPoint>, Vec<Counterexample>)> = jobs
        .par_iter()
        .map(|&(t0, field, theta)| -> Result<_> {
            let ray = RaySpec {
                t0,
                theta,
                rho_end: reach,
            };
            let cfg = IntegratorConfig {
                dt: reach / opts.ray_steps as f64,
                sample_every: 1,
                snapshot_every: None,
                error_estimation: false,
                alphas: alphas.clone(),
                ..base.clone()
            };
            let traj = integrate_ray(field, setup, ray, &cfg)?;
            let mut points = Vec::new();
            let mut bad = Vec::new();
            for s in &traj.samples {
                for (j, (&a, row)) in opts.alphas.iter().zip(&rows).enumerate() {
                    if s.rho > SQRT_2 * row.delta * (1.0 + 1e-12) {
                        continue;
                    }
                    let bound = table.strip_bound(a).unwrap_or(f64::INFINITY);
                    let p = MarginPoint::new(t0, theta, s.rho, a, s.norms[j], bound);
                    if p.margin < 1.0 {
                        bad.push(Counterexample {
                            reason: "strip bound exceeded".into(),
                            ray,
                            rho: s.rho,
                            alpha: Some(a),
                            measured: p.measured,
                            bound: p.bound,
                            step: traj.metadata.step,
                        });
                    }
                    points.push(p);
                }
            }
            if let Some(f) = &traj.failure {
                bad.push(Counterexample {
                    reason: format!("integration failed inside the strip ({:?})", f.kind),
                    ray,
                    rho: f.rho,
                    alpha: None,
                    measured: f.gradient_norm,
                    bound: f64::NAN,
                    step: traj.metadata.step,
                });
            }
            Ok((points, bad))
        })
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    for (p, c) in results {
        points.extend(p);
        counterexamples.extend(c);
    }
    let min_of = |v: &[MarginPoint]| v.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);
    Ok(VerificationReport {
        setup: setup.summary(),
        table_mode: table.mode.name().to_string(),
        anchors: anchors.iter().map(|a| a.0).collect(),
        min_margin: min_of(&points),
        min_real_margin: min_of(&real_axis),
        points,
        real_axis,
        counterexamples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectorOptions {
    pub t0: f64,
    pub thetas: Vec<f64>,
    /// Steps along each ray of length `rho_1`.
    pub steps: usize,
}

impl Default for SectorOptions {
    fn default() -> Self {
        Self {
            t0: 0.0,
            thetas: angle_sweep(9),
            steps: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    /// `|A^{1/2} v0| / (nu kappa0)`.
    pub data_size: f64,
    /// Sector radius `rho_1 = rho_max(G, x)`.
    pub rho1: f64,
    /// `M_{1,1} nu kappa0`.
    pub bound: f64,
    pub points: Vec<MarginPoint>,
    pub min_margin: f64,
    pub counterexamples: Vec<Counterexample>,
}

impl SectorReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.min_margin >= 1.0
    }
}

/// Integrates from `v0` along rays filling the sector `S(t0, rho_1)` and checks
/// `|A^{1/2} V(zeta)| <= M_{1,1} nu kappa0` at every step.
pub fn verify_sector(
    v0: &SpectralField,
    setup: &PhysicalSetup,
    opts: &SectorOptions,
) -> Result<SectorReport> {
    if opts.steps == 0 {
        return Err(Error::InvalidArgument(
            "need at least one step per ray".into(),
        ));
    }
    if let Some(&t) = opts
        .thetas
        .iter()
        .find(|t| t.abs() > FRAC_PI_4 * (1.0 + 1e-12))
    {
        return Err(Error::InvalidRay(t));
    }
    let scale = setup.nu() * setup.kappa0();
    let x = v0.sobolev_norm(1.0) / scale;
    let c = LedgerConstants::new(setup.nu(), setup.kappa0(), setup.grashof())?;
    let radii = SectorRadii::new(&c);
    let rho1 = radii.rho_max_ln(x.ln()).exp();
    let bound = radii.m1_ln(x.ln()).exp() * scale;
    let results: Vec<(Vec<MarginPoint>, Vec<Counterexample>)> = opts
        .thetas
        .par_iter()
        .map(|&theta| -> Result<_> {
            let ray = RaySpec {
                t0: opts.t0,
                theta,
                rho_end: rho1,
            };
            let cfg = IntegratorConfig {
                dt: rho1 / opts.steps as f64,
                alphas: vec![1.0],
                ..IntegratorConfig::default_for(setup)
            };
            let traj = integrate_ray(v0, setup, ray, &cfg)?;
            let mut bad = Vec::new();
            let points: Vec<MarginPoint> = traj
                .samples
                .iter()
                .map(|s| MarginPoint::new(opts.t0, theta, s.rho, 1, s.norms[0], bound))
                .collect();
            for p in points.iter().filter(|p| p.margin < 1.0) {
                bad.push(Counterexample {
                    reason: "sector bound exceeded".into(),
                    ray,
                    rho: p.rho,
                    alpha: Some(1),
                    measured: p.measured,
                    bound,
                    step: traj.metadata.step,
                });
            }
            if let Some(f) = &traj.failure {
                bad.push(Counterexample {
                    reason: format!("integration failed inside the sector ({:?})", f.kind),
                    ray,
                    rho: f.rho,
                    alpha: None,
                    measured: f.gradient_norm,
                    bound,
                    step: traj.metadata.step,
                });
            }
            Ok((points, bad))
        })
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    let mut counterexamples = Vec::new();
    for (p, c) in results {
        points.extend(p);
        counterexamples.extend(c);
    }
    let min_margin = points
        .iter()
        .map(|p| p.margin)
        .fold(f64::INFINITY, f64::min);
    Ok(SectorReport {
        data_size: x,
        rho1,
        bound,
        points,
        min_margin,
        counterexamples,
    })
}
