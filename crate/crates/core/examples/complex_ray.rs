//! Integrates a Kolmogorov flow through a short transient, then follows
//! rays into complex time at several angles.

use std::f64::consts::FRAC_PI_4;

use nse_lab::dynamics::{integrate_ray, integrate_real, IntegratorConfig, PhysicalSetup, RaySpec};
use nse_lab::spectral::{random_field, FieldFamily, GridSpec, Symmetry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nse_lab::Result<()> {
    let setup = PhysicalSetup::kolmogorov(GridSpec::standard(16)?, 1.0, 4, 40.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u0 = random_field(
        *setup.grid(),
        FieldFamily::PowerLaw {
            slope: 1.0,
            cutoff: 4.0,
        },
        Symmetry::Real,
        &mut rng,
    )?
    .normalized(1.0, 5.0)?;
    let cfg = IntegratorConfig::default_for(&setup);
    let settled = integrate_real(&u0, &setup, 0.5, &cfg)?;
    let start = settled.final_field;
    println!(
        "G = {}, |A^1/2 u(0.5)| = {:.4e}",
        setup.grashof(),
        start.sobolev_norm(1.0)
    );

    let ray_cfg = IntegratorConfig {
        dt: 1e-3,
        sample_every: 50,
        alphas: vec![0.0, 1.0, 2.0],
        ..cfg
    };
    for theta in [
        -FRAC_PI_4,
        -FRAC_PI_4 / 2.0,
        0.0,
        FRAC_PI_4 / 2.0,
        FRAC_PI_4,
    ] {
        let traj = integrate_ray(
            &start,
            &setup,
            RaySpec {
                t0: 0.5,
                theta,
                rho_end: 0.2,
            },
            &ray_cfg,
        )?;
        let last = traj.samples.last().expect("samples");
        println!(
            "theta = {theta:+.4}: zeta = {:.4}{:+.4}i, |u| = {:.4e}, |A^1/2 u| = {:.4e}, |Au| = {:.4e}{}",
            last.zeta.re,
            last.zeta.im,
            last.norms[0],
            last.norms[1],
            last.norms[2],
            if traj.completed() { "" } else { "  (blowup guard tripped)" }
        );
    }
    Ok(())
}
