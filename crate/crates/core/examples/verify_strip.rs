//! Strip and sector checks at G = 1: measured `|A^{1/2} u|` on the real axis,
//! along complex rays inside the strip, and inside the sector from large data.

use nse_lab::dynamics::{verify_sector, verify_strip, PhysicalSetup, SectorOptions, StripOptions};
use nse_lab::ledger::{build_table, LedgerConstants, LedgerOptions, TableMode};
use nse_lab::spectral::{random_field, FieldFamily, GridSpec, SpectralField, Symmetry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nse_lab::Result<()> {
    let setup = PhysicalSetup::kolmogorov(GridSpec::standard(24)?, 1.0, 2, 1.0)?;
    let c = LedgerConstants::from_setup(&setup, 3)?;
    let table = build_table(
        TableMode::ConditionalFixedStrip,
        &c,
        &LedgerOptions::default(),
    )?;
    println!(
        "delta_1 = {:.4e}, strip bound sqrt2 G nu kappa0 = {:.4}",
        c.delta[0],
        table.strip_bound(1).unwrap()
    );

    let u0 = SpectralField::zeros(*setup.grid(), Symmetry::Real);
    let report = verify_strip(&u0, &setup, &table, &StripOptions::default())?;
    println!(
        "strip: {} points, min margin {:.4}; real axis: {} points, min margin {:.4}; passed = {}",
        report.points.len(),
        report.min_margin,
        report.real_axis.len(),
        report.min_real_margin,
        report.passed()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for x in [0.5, 2.0, 8.0] {
        let v0 = random_field(
            *setup.grid(),
            FieldFamily::PowerLaw {
                slope: 1.0,
                cutoff: 6.0,
            },
            Symmetry::Real,
            &mut rng,
        )?
        .normalized(1.0, x)?;
        let s = verify_sector(&v0, &setup, &SectorOptions::default())?;
        println!(
            "sector from |A^1/2 v0| = {x}: rho_1 = {:.3e}, bound M_11 = {:.4}, min margin {:.4}, passed = {}",
            s.rho1,
            s.bound,
            s.min_margin,
            s.passed()
        );
    }
    Ok(())
}
