//! Recovers the body force from a trajectory as `du/dt + nu A u + B(u, u)`.

use nse_lab::dynamics::{integrate_real, recover_force, IntegratorConfig, PhysicalSetup};
use nse_lab::spectral::{random_field, FieldFamily, GridSpec, Symmetry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nse_lab::Result<()> {
    let setup = PhysicalSetup::kolmogorov(GridSpec::standard(12)?, 1.0, 3, 20.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u0 = random_field(
        *setup.grid(),
        FieldFamily::PowerLaw {
            slope: 2.0,
            cutoff: 4.0,
        },
        Symmetry::Real,
        &mut rng,
    )?;
    for dt in [4e-3, 2e-3, 1e-3] {
        let cfg = IntegratorConfig {
            dt,
            snapshot_every: Some(1),
            ..IntegratorConfig::default_for(&setup)
        };
        let traj = integrate_real(&u0, &setup, 20.0 * dt, &cfg)?;
        let rec = recover_force(&traj, 10, &setup)?;
        let worst = rec.shell_deviation.iter().map(|s| s.1).fold(0.0, f64::max);
        println!(
            "dt = {dt:.0e}: relative error {:.3e}, largest shell deviation {worst:.3e}",
            rec.relative_error
        );
    }
    Ok(())
}
