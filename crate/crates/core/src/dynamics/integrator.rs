//! Integrating-factor RK4 along rays `zeta = t0 + rho e^{i theta}` in complex time.
//!
//! The affine Stokes part `e^{i theta}(g - nu A u)` is propagated exactly by
//! shifting to the steady Stokes state `(nu A)^{-1} g`; only `B(u, u)` goes
//! through the Runge-Kutta stages.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use super::setup::{PhysicalSetup, SetupSummary};
use crate::bilinear::BilinearWorkspace;
use crate::error::{Error, Result};
use crate::spectral::{
    symmetrize_raw, weighted_sum, GridSpec, Mode, SpectralField, Symmetry, C64, ZERO,
};

/// A ray `zeta(rho) = t0 + rho e^{i theta}`, `0 <= rho <= rho_end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RaySpec {
    pub t0: f64,
    pub theta: f64,
    pub rho_end: f64,
}

impl RaySpec {
    pub fn zeta(&self, rho: f64) -> C64 {
        C64::new(self.t0, 0.0) + C64::from_polar(rho, self.theta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Step in `rho`; the last step is shortened so the ray ends exactly at `rho_end`.
    pub dt: f64,
    /// Estimate the local error by step doubling (three times the work).
    #[serde(default)]
    pub error_estimation: bool,
    /// Abort once `|A^{1/2} u|` exceeds this value.
    #[serde(default)]
    pub blowup_threshold: Option<f64>,
    #[serde(default = "one")]
    pub sample_every: usize,
    /// Store full fields every this many steps.
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    /// Set to false to drop `B` and integrate the Stokes equation.
    #[serde(default = "yes")]
    pub nonlinear: bool,
    /// Exponents `alpha` at which `|A^{alpha/2} u|` is sampled.
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn default_alphas() -> Vec<f64> {
    vec![0.0, 1.0, 2.0]
}

impl IntegratorConfig {
    /// Advective step `0.5 / (nu kappa0^2 K max(G, 1))`.
    pub fn default_for(setup: &PhysicalSetup) -> Self {
        let k = setup.grid().k_max() as f64;
        Self {
            dt: 0.5 / (setup.rate() * k * setup.grashof().max(1.0)),
            error_estimation: false,
            blowup_threshold: None,
            sample_every: 1,
            snapshot_every: None,
            nonlinear: true,
            alphas: default_alphas(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "step must be positive, got {}",
                self.dt
            )));
        }
        if self.sample_every == 0 || self.snapshot_every == Some(0) {
            return Err(Error::InvalidArgument(
                "sampling intervals must be positive".into(),
            ));
        }
        if self.alphas.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidArgument(
                "norm exponents must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub step: usize,
    pub zeta: C64,
    pub rho: f64,
    /// `|A^{alpha/2} u|` for each configured `alpha`, in order.
    pub norms: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub zeta: C64,
    pub field: SpectralField,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Blowup,
    NonFinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub step: usize,
    pub rho: f64,
    pub gradient_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub setup: SetupSummary,
    pub config: IntegratorConfig,
    pub ray: RaySpec,
    pub step: f64,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub metadata: RunMetadata,
    pub samples: Vec<Sample>,
    pub snapshots: Vec<Snapshot>,
    pub final_field: SpectralField,
    pub failure: Option<Failure>,
}

impl TrajectoryRecord {
    /// Position of `alpha` in the sampled exponent list.
    pub fn alpha_index(&self, alpha: f64) -> Option<usize> {
        self.metadata.config.alphas.iter().position(|&a| a == alpha)
    }

    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

struct Factors {
    h: f64,
    full: Vec<C64>,
    half: Vec<C64>,
}

impl Factors {
    fn new(grid: &GridSpec, nu: f64, rot: C64, h: f64) -> Self {
        let rate = |idx: usize| -rot * nu * grid.eigenvalue(idx);
        Self {
            h,
            full: (0..grid.len()).map(|i| (rate(i) * h).exp()).collect(),
            half: (0..grid.len())
                .map(|i| (rate(i) * (0.5 * h)).exp())
                .collect(),
        }
    }
}

struct Stepper {
    rot: C64,
    nonlinear: bool,
    ws: BilinearWorkspace,
    shift: Vec<Mode>,
    k: [Vec<Mode>; 4],
    w: Vec<Mode>,
    stage: Vec<Mode>,
}

impl Stepper {
    fn new(setup: &PhysicalSetup, theta: f64, nonlinear: bool) -> Self {
        let grid = *setup.grid();
        let nu = setup.nu();
        let shift = setup
            .force()
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let lam = grid.eigenvalue(i);
                if lam == 0.0 {
                    ZERO
                } else {
                    [g[0] / (nu * lam), g[1] / (nu * lam)]
                }
            })
            .collect();
        let n = grid.len();
        Self {
            rot: C64::from_polar(1.0, theta),
            nonlinear,
            ws: BilinearWorkspace::new(&grid),
            shift,
            k: [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]],
            w: vec![ZERO; n],
            stage: vec![ZERO; n],
        }
    }

    /// `-e^{i theta} B(s + w, s + w)` into `self.k[slot]`, with `w = self.stage`.
    fn nonlinear_term(&mut self, slot: usize) {
        let out = &mut self.k[slot];
        if !self.nonlinear {
            out.fill(ZERO);
            return;
        }
        for (st, s) in self.stage.iter_mut().zip(&self.shift) {
            st[0] += s[0];
            st[1] += s[1];
        }
        self.ws.apply_self(&self.stage, out);
        let r = -self.rot;
        for m in out.iter_mut() {
            m[0] *= r;
            m[1] *= r;
        }
    }

    fn step(&mut self, u: &mut [Mode], f: &Factors) {
        let h = f.h;
        for ((w, x), s) in self.w.iter_mut().zip(u.iter()).zip(&self.shift) {
            *w = [x[0] - s[0], x[1] - s[1]];
        }
        self.stage.copy_from_slice(&self.w);
        self.nonlinear_term(0);
        for i in 0..self.w.len() {
            let (w, k1, e) = (self.w[i], self.k[0][i], f.half[i]);
            self.stage[i] = [e * (w[0] + 0.5 * h * k1[0]), e * (w[1] + 0.5 * h * k1[1])];
        }
        self.nonlinear_term(1);
        for i in 0..self.w.len() {
            let (w, k2, e) = (self.w[i], self.k[1][i], f.half[i]);
            self.stage[i] = [e * w[0] + 0.5 * h * k2[0], e * w[1] + 0.5 * h * k2[1]];
        }
        self.nonlinear_term(2);
        for i in 0..self.w.len() {
            let (w, k3, e, eh) = (self.w[i], self.k[2][i], f.full[i], f.half[i]);
            self.stage[i] = [e * w[0] + h * eh * k3[0], e * w[1] + h * eh * k3[1]];
        }
        self.nonlinear_term(3);
        for i in 0..u.len() {
            let (e, eh, w, s) = (f.full[i], f.half[i], self.w[i], self.shift[i]);
            let (k1, k2, k3, k4) = (self.k[0][i], self.k[1][i], self.k[2][i], self.k[3][i]);
            for c in 0..2 {
                let incr = e * k1[c] + 2.0 * eh * (k2[c] + k3[c]) + k4[c];
                u[i][c] = s[c] + e * w[c] + h / 6.0 * incr;
            }
        }
    }
}

/// Integrates `du/drho = e^{i theta} (g - nu A u - B(u, u))` from `u0` along `ray`.
///
/// A blow-up or non-finite state ends the run early with a [`Failure`] marker;
/// the returned record then holds everything sampled up to that point.
pub fn integrate_ray(
    u0: &SpectralField,
    setup: &PhysicalSetup,
    ray: RaySpec,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    if !(ray.theta.abs() <= FRAC_PI_4 * (1.0 + 1e-12)) {
        return Err(Error::InvalidRay(ray.theta));
    }
    if !(ray.rho_end.is_finite() && ray.rho_end >= 0.0 && ray.t0.is_finite()) {
        return Err(Error::InvalidArgument(
            "ray length must be finite and nonnegative".into(),
        ));
    }
    if !u0.grid().same_as(setup.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = *setup.grid();
    let steps = if ray.rho_end == 0.0 {
        0
    } else {
        (ray.rho_end / cfg.dt - 1e-9).ceil().max(1.0) as usize
    };
    let h = if steps == 0 {
        0.0
    } else {
        ray.rho_end / steps as f64
    };
    let real = ray.theta == 0.0 && u0.symmetry() == Symmetry::Real;
    let symmetry = if real {
        Symmetry::Real
    } else {
        Symmetry::Complex
    };
    let rot = C64::from_polar(1.0, ray.theta);
    let threshold = cfg.blowup_threshold.unwrap_or_else(|| {
        let scale = setup.nu() * setup.kappa0();
        1e3 * (u0.sobolev_norm(1.0))
            .max(scale * setup.grashof())
            .max(scale)
    });

    let mut stepper = Stepper::new(setup, ray.theta, cfg.nonlinear);
    let full = Factors::new(&grid, setup.nu(), rot, h);
    let half = cfg
        .error_estimation
        .then(|| Factors::new(&grid, setup.nu(), rot, 0.5 * h));

    let mut u = u0.coeffs().to_vec();
    let mut trial = vec![ZERO; grid.len()];
    let mut samples = Vec::new();
    let mut snapshots = Vec::new();
    let mut failure = None;
    let length = grid.length();
    let record = |u: &[Mode], step: usize, err: Option<f64>, samples: &mut Vec<Sample>| {
        let rho = step as f64 * h;
        samples.push(Sample {
            step,
            zeta: ray.zeta(rho),
            rho,
            norms: cfg
                .alphas
                .iter()
                .map(|&a| length * weighted_sum(&grid, u, a).sqrt())
                .collect(),
            error_estimate: err,
        });
    };
    let snap = |u: &[Mode], step: usize, snapshots: &mut Vec<Snapshot>| {
        if let Some(every) = cfg.snapshot_every {
            if step.is_multiple_of(every) {
                snapshots.push(Snapshot {
                    step,
                    zeta: ray.zeta(step as f64 * h),
                    field: SpectralField::from_coeffs_unchecked(grid, u.to_vec(), symmetry),
                });
            }
        }
    };
    record(&u, 0, None, &mut samples);
    snap(&u, 0, &mut snapshots);

    for step in 1..=steps {
        let mut err = None;
        match &half {
            None => stepper.step(&mut u, &full),
            Some(hf) => {
                trial.copy_from_slice(&u);
                stepper.step(&mut trial, &full);
                stepper.step(&mut u, hf);
                stepper.step(&mut u, hf);
                let diff: Vec<Mode> = trial
                    .iter()
                    .zip(&u)
                    .map(|(a, b)| [a[0] - b[0], a[1] - b[1]])
                    .collect();
                err = Some(length * weighted_sum(&grid, &diff, 0.0).sqrt() / 15.0);
            }
        }
        if real {
            symmetrize_raw(&grid, &mut u);
        }
        let grad = length * weighted_sum(&grid, &u, 1.0).sqrt();
        if !grad.is_finite() || grad > threshold {
            let kind = if grad.is_finite() {
                FailureKind::Blowup
            } else {
                FailureKind::NonFinite
            };
            failure = Some(Failure {
                kind,
                step,
                rho: step as f64 * h,
                gradient_norm: grad,
            });
            record(&u, step, err, &mut samples);
            break;
        }
        if step % cfg.sample_every == 0 || step == steps {
            record(&u, step, err, &mut samples);
        }
        snap(&u, step, &mut snapshots);
    }

    Ok(TrajectoryRecord {
        metadata: RunMetadata {
            setup: setup.summary(),
            config: cfg.clone(),
            ray,
            step: h,
            steps,
        },
        samples,
        snapshots,
        final_field: SpectralField::from_coeffs_unchecked(grid, u, symmetry),
        failure,
    })
}

/// Real-time integration over `[0, t_end]`.
pub fn integrate_real(
    u0: &SpectralField,
    setup: &PhysicalSetup,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryRecord> {
    integrate_ray(
        u0,
        setup,
        RaySpec {
            t0: 0.0,
            theta: 0.0,
            rho_end: t_end,
        },
        cfg,
    )
}

/// Closed-form Stokes solution
/// `u(zeta) = e^{-nu lam zeta} u0 + (1 - e^{-nu lam zeta}) g / (nu lam)`, mode by mode.
pub fn stokes_exact(u0: &SpectralField, setup: &PhysicalSetup, zeta: C64) -> Result<SpectralField> {
    if !u0.grid().same_as(setup.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = *setup.grid();
    let nu = setup.nu();
    let coeffs = u0
        .coeffs()
        .iter()
        .zip(setup.force().coeffs())
        .enumerate()
        .map(|(i, (u, g))| {
            let lam = nu * grid.eigenvalue(i);
            if lam == 0.0 {
                return ZERO;
            }
            let e = (-lam * zeta).exp();
            let one_minus = C64::new(1.0, 0.0) - e;
            [
                e * u[0] + one_minus * g[0] / lam,
                e * u[1] + one_minus * g[1] / lam,
            ]
        })
        .collect();
    let symmetry = if zeta.im == 0.0 {
        u0.symmetry()
    } else {
        Symmetry::Complex
    };
    Ok(SpectralField::from_coeffs_unchecked(grid, coeffs, symmetry))
}
