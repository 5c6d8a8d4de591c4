//! Small-Grashof regime: the fixed point of `nu A u + B(u, u) = g` for a
//! two-mode force, reached once by Picard iteration and once by time stepping.

use nse_lab::dynamics::{
    integrate_real, steady_state_solve, IntegratorConfig, PhysicalSetup, SteadyOptions,
};
use nse_lab::spectral::{GridSpec, SpectralField, Symmetry, C64};

fn main() -> nse_lab::Result<()> {
    let grid = GridSpec::standard(12)?;
    let shape = SpectralField::from_modes(
        grid,
        &[
            ((0, 1), [C64::new(0.0, -0.5), C64::new(0.0, 0.0)]),
            ((0, -1), [C64::new(0.0, 0.5), C64::new(0.0, 0.0)]),
            ((1, 1), [C64::new(0.3, 0.1), C64::new(-0.3, -0.1)]),
            ((-1, -1), [C64::new(0.3, -0.1), C64::new(-0.3, 0.1)]),
        ],
        Symmetry::Real,
    )?;
    let setup = PhysicalSetup::with_grashof(1.0, shape, 0.5)?;
    println!(
        "G = {:.3}, single-point regime: {}",
        setup.grashof(),
        setup.single_point_regime()
    );

    let st = steady_state_solve(&setup, &SteadyOptions::default())?;
    println!(
        "Picard: {} iterations, residual / |g| = {:.2e}",
        st.iterations,
        st.residual / setup.force().norm()
    );

    let cfg = IntegratorConfig {
        dt: 0.05,
        ..IntegratorConfig::default_for(&setup)
    };
    let traj = integrate_real(
        &SpectralField::zeros(grid, Symmetry::Real),
        &setup,
        40.0,
        &cfg,
    )?;
    let diff = traj
        .final_field
        .axpy(C64::new(-1.0, 0.0), &st.field)?
        .norm();
    println!(
        "time stepping to t = 40: |u(40) - u_steady| = {diff:.2e} (|u_steady| = {:.4e})",
        st.field.norm()
    );
    Ok(())
}
