//! `B(u, v)` by padded transforms against the explicit triad sum, then the
//! identity residuals and inequality ratios over a small random suite.

use nse_lab::bilinear::{bilinear_direct, bilinear_fft, run_suite, Inequality, SuiteConfig};
use nse_lab::spectral::{random_field, FieldFamily, GridSpec, Symmetry, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nse_lab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in [8, 12, 16] {
        let grid = GridSpec::standard(k)?;
        let fam = FieldFamily::WhiteInShell {
            k_lo: 1.0,
            k_hi: k as f64,
        };
        let u = random_field(grid, fam, Symmetry::Complex, &mut rng)?;
        let v = random_field(grid, fam, Symmetry::Complex, &mut rng)?;
        let fast = bilinear_fft(&u, &v)?;
        let slow = bilinear_direct(&u, &v)?;
        let rel = fast.axpy(C64::new(-1.0, 0.0), &slow)?.norm() / slow.norm();
        println!("K = {k:2}: |B_fft - B_direct| / |B_direct| = {rel:.2e}");
    }

    let report = run_suite(&SuiteConfig::standard(8, 40, 3))?;
    for name in [
        "skew",
        "enstrophy_orthogonality",
        "transfer",
        "cyclic_sum",
        "stokes_commutator",
    ] {
        println!(
            "{name:>24}: max residual {:.2e}",
            report.max(name).unwrap_or(f64::NAN)
        );
    }
    let mut kinds = vec![
        Inequality::RealSecondOrder,
        Inequality::RealThirdOrder,
        Inequality::ComplexFirstOrder,
        Inequality::ComplexSecondOrder,
        Inequality::ComplexThirdOrder,
    ];
    kinds.extend((4..=8).flat_map(|a| {
        [
            Inequality::RealHighOrder(a),
            Inequality::ComplexHighOrder(a),
        ]
    }));
    for kind in kinds {
        let name = kind.name();
        println!(
            "{name:>24}: max lhs/rhs {:.3e}",
            report.max(&name).unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
