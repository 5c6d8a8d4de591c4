use serde::{Deserialize, Serialize};

use super::setup::PhysicalSetup;
use crate::bilinear::BilinearWorkspace;
use crate::error::{Error, Result};
use crate::spectral::{symmetrize_raw, weighted_sum, Mode, SpectralField, Symmetry, ZERO};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadyOptions {
    pub max_iterations: usize,
    /// Stop when `|nu A u + B(u,u) - g| <= tol |g|`.
    pub tol: f64,
    /// Under-relaxation weight in `(0, 1]`.
    pub relaxation: f64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tol: 1e-12,
            relaxation: 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub field: SpectralField,
    /// Absolute residual `|nu A u + B(u, u) - g|`.
    pub residual: f64,
    pub iterations: usize,
}

/// Fixed-point iteration `u <- (nu A)^{-1} (g - B(u, u))` started from the Stokes solution.
pub fn steady_state_solve(setup: &PhysicalSetup, opts: &SteadyOptions) -> Result<SteadyState> {
    if !(opts.relaxation > 0.0 && opts.relaxation <= 1.0) {
        return Err(Error::InvalidArgument(
            "relaxation must lie in (0, 1]".into(),
        ));
    }
    let grid = *setup.grid();
    let nu = setup.nu();
    let g = setup.force().coeffs();
    let gnorm = setup.force().norm();
    let mut ws = BilinearWorkspace::new(&grid);
    let mut u = vec![ZERO; grid.len()];
    let mut b = vec![ZERO; grid.len()];
    let mut r = vec![ZERO; grid.len()];
    let solve = |rhs: &[Mode], out: &mut [Mode]| {
        for (i, (o, x)) in out.iter_mut().zip(rhs).enumerate() {
            let lam = nu * grid.eigenvalue(i);
            *o = if lam == 0.0 {
                ZERO
            } else {
                [x[0] / lam, x[1] / lam]
            };
        }
    };
    solve(g, &mut u);
    let mut residual = f64::INFINITY;
    for it in 0..=opts.max_iterations {
        ws.apply_self(&u, &mut b);
        for (i, ((ri, bi), gi)) in r.iter_mut().zip(&b).zip(g).enumerate() {
            let lam = nu * grid.eigenvalue(i);
            *ri = [lam * u[i][0] + bi[0] - gi[0], lam * u[i][1] + bi[1] - gi[1]];
        }
        residual = grid.length() * weighted_sum(&grid, &r, 0.0).sqrt();
        if !residual.is_finite() {
            break;
        }
        if residual <= opts.tol * gnorm.max(f64::MIN_POSITIVE) {
            symmetrize_raw(&grid, &mut u);
            return Ok(SteadyState {
                field: SpectralField::from_coeffs_unchecked(grid, u, Symmetry::Real),
                residual,
                iterations: it,
            });
        }
        let rhs: Vec<Mode> = g
            .iter()
            .zip(&b)
            .map(|(gi, bi)| [gi[0] - bi[0], gi[1] - bi[1]])
            .collect();
        let mut next = vec![ZERO; grid.len()];
        solve(&rhs, &mut next);
        let w = opts.relaxation;
        for (ui, ni) in u.iter_mut().zip(&next) {
            ui[0] = (1.0 - w) * ui[0] + w * ni[0];
            ui[1] = (1.0 - w) * ui[1] + w * ni[1];
        }
        symmetrize_raw(&grid, &mut u);
    }
    Err(Error::NotConverged {
        iterations: opts.max_iterations,
        residual,
    })
}
