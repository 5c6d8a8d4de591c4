//! The bound ledger at G = 1: seed constants, the three recursive tables, their
//! envelopes and truncated products, and the class-propagation chain.

use nse_lab::dynamics::PhysicalSetup;
use nse_lab::ledger::{
    build_table, crossover, sigma_propagation, LedgerConstants, LedgerOptions, TableMode,
};
use nse_lab::spectral::GridSpec;

fn main() -> nse_lab::Result<()> {
    let setup = PhysicalSetup::kolmogorov(GridSpec::standard(16)?, 1.0, 2, 1.0)?;
    let opts = LedgerOptions::default();
    let c = LedgerConstants::from_setup(&setup, opts.alpha_max)?;
    println!("c_L = {:.5}, c_A = {:.5}", c.c_l, c.c_a);
    println!("delta = {:?}", c.delta);
    println!("R~ = {:?}, R = {:?}", c.strip_radius, c.real_radius);

    let fixed = build_table(TableMode::ConditionalFixedStrip, &c, &opts)?;
    let shrinking = build_table(TableMode::ConditionalShrinking, &c, &opts)?;
    let uncond = build_table(TableMode::Unconditional, &c, &opts)?;
    println!(
        "{:>5} {:>14} {:>14} {:>14}",
        "alpha", "fixed ln R~^2", "shrink ln R~^2", "uncond ln m^2"
    );
    for a in [1, 2, 3, 4, 5, 6, 8, 10, 15, 20, 30] {
        let f = |t: &nse_lab::ledger::BoundTable| t.row(a).map(|r| r.rt_sq_ln).unwrap_or(f64::NAN);
        println!(
            "{a:>5} {:>14.6e} {:>14.6e} {:>14.6e}",
            f(&fixed),
            f(&shrinking),
            f(&uncond)
        );
    }
    println!(
        "shrinking strip becomes the smaller bound from alpha = {:?}",
        crossover(&fixed, &shrinking)
    );
    for t in [&fixed, &shrinking] {
        for p in &t.products {
            println!(
                "{}: ln = {:.6e} after {} factors, converged = {}",
                p.name, p.value_ln, p.last_index, p.converged
            );
        }
        for w in &t.warnings {
            println!("warning ({}): {w}", t.mode.name());
        }
    }
    let s = sigma_propagation(1.0, 1.0, &c)?;
    println!(
        "sigma = 1: sigma_1 = {:.6}, sigma_2 = {:.6}, sigma_3 = {:.6}, alpha_1 = {}",
        s.sigma1, s.sigma2, s.sigma3, s.alpha1
    );
    Ok(())
}
