//! C(sigma) norms of single-shell and Gevrey-log fields, the class ratio,
//! the sigma estimator, and the Gevrey-log operator bound.

use std::f64::consts::E;

use nse_lab::sigma_class::{
    c_sigma_norm, estimate_sigma, gevrey_log_apply, gevrey_log_opnorm, shell_ratio, NormMode,
    Scaling,
};
use nse_lab::spectral::{random_field, FieldFamily, GridSpec, Symmetry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nse_lab::Result<()> {
    let grid = GridSpec::standard(64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let shell = random_field(
        grid,
        FieldFamily::SingleShell { k_sq: 50 },
        Symmetry::Real,
        &mut rng,
    )?;
    let (s1, s2) = (0.5, 1.5);
    let n1 = c_sigma_norm(&shell, s1, NormMode::Continuous, Scaling::Raw)?;
    let n2 = c_sigma_norm(&shell, s2, NormMode::Continuous, Scaling::Raw)?;
    println!(
        "single shell |k|^2 = 50: norm ratio {:.12e}, closed form {:.12e}",
        n1.value / n2.value,
        shell_ratio(50.0, s1, s2)?
    );
    println!(
        "worked value ratio(e^8, 1, 2) = {:.6} (e^4 = {:.6})",
        shell_ratio(E.powi(8), 1.0, 2.0)?,
        E.powi(4)
    );

    let flat = random_field(
        grid,
        FieldFamily::PowerLaw {
            slope: 0.0,
            cutoff: f64::INFINITY,
        },
        Symmetry::Real,
        &mut rng,
    )?;
    let alphas: Vec<f64> = (1..=12).map(|a| a as f64).collect();
    for b in [0.5, 1.0, 2.0] {
        let v = gevrey_log_apply(&flat, 3.0, b, -1)?;
        let fit = estimate_sigma(
            &v.norm_profile(&alphas),
            Scaling::Normalized {
                nu: 1.0,
                kappa0: 1.0,
            },
        )?;
        println!(
            "Gevrey-log field a = 3, b = {b}: sigma_hat = {:.4} (membership in C(1/b) needs at most {:.4}), fit residual {:.2e}",
            fit.sigma_hat,
            1.0 / b,
            fit.residual
        );
    }
    for alpha in [0.0, 5.0, 10.0, 20.0] {
        let r = gevrey_log_opnorm(alpha, 3.0, 1.0, 64)?;
        println!(
            "alpha = {alpha:>4}: ln sup = {:.4}, ln bound = {:.4}, holds = {}",
            r.ln_discrete_sup,
            r.ln_bound,
            r.holds()
        );
    }
    Ok(())
}
