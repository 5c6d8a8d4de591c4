use super::integrator::TrajectoryRecord;
use super::setup::PhysicalSetup;
use crate::bilinear::BilinearWorkspace;
use crate::error::{Error, Result};
use crate::spectral::{Mode, SpectralField, Symmetry, ZERO};

#[derive(Clone, Debug)]
pub struct ForceRecovery {
    pub field: SpectralField,
    /// `|g_rec - g| / |g|`.
    pub relative_error: f64,
    /// `(|k|^2, L^2 sum over the shell of |g_rec - g|^2)`, for shells with nonzero deviation.
    pub shell_deviation: Vec<(i64, f64)>,
}

/// Reconstructs `g = du/dzeta + nu A u + B(u, u)` at snapshot `index`, with the
/// derivative from a five-point stencil on neighbouring snapshots.
pub fn recover_force(
    traj: &TrajectoryRecord,
    index: usize,
    setup: &PhysicalSetup,
) -> Result<ForceRecovery> {
    let s = &traj.snapshots;
    if index < 2 || index + 2 >= s.len() {
        return Err(Error::InvalidArgument(
            "stencil needs two snapshots on each side".into(),
        ));
    }
    let h = s[index + 1].zeta - s[index].zeta;
    for i in index - 2..index + 2 {
        let d = s[i + 1].zeta - s[i].zeta;
        if (d - h).norm() > 1e-9 * h.norm() {
            return Err(Error::InvalidArgument(
                "snapshots around the index are not equally spaced".into(),
            ));
        }
    }
    let grid = *setup.grid();
    let nu = setup.nu();
    let u = s[index].field.coeffs();
    let mut b = vec![ZERO; grid.len()];
    if traj.metadata.config.nonlinear {
        BilinearWorkspace::new(&grid).apply_self(u, &mut b);
    }
    let c = |k: usize| s[k].field.coeffs();
    let (m2, m1, p1, p2) = (c(index - 2), c(index - 1), c(index + 1), c(index + 2));
    let coeffs: Vec<Mode> = (0..grid.len())
        .map(|i| {
            let lam = nu * grid.eigenvalue(i);
            let mut out = ZERO;
            for k in 0..2 {
                let du = (-p2[i][k] + 8.0 * p1[i][k] - 8.0 * m1[i][k] + m2[i][k]) / (12.0 * h);
                out[k] = du + lam * u[i][k] + b[i][k];
            }
            out
        })
        .collect();
    let field = SpectralField::from_coeffs_unchecked(grid, coeffs, Symmetry::Complex);
    let diff = field.axpy(crate::spectral::C64::new(-1.0, 0.0), setup.force())?;
    let relative_error = diff.norm() / setup.force().norm();
    Ok(ForceRecovery {
        field,
        relative_error,
        shell_deviation: diff.shell_energies(),
    })
}
