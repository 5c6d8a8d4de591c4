//! Random divergence-free fields, their Sobolev and Lebesgue norms, the stream
//! function, and a snapshot roundtrip.

use nse_lab::constants::{agmon, ladyzhenskaya};
use nse_lab::spectral::{
    from_stream_function, io, lebesgue_norms, random_field, stream_function, FieldFamily, GridSpec,
    Symmetry, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nse_lab::Result<()> {
    let grid = GridSpec::standard(16)?;
    println!(
        "K = {}, padded transform size M = {}",
        grid.k_max(),
        grid.padded()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = random_field(
        grid,
        FieldFamily::PowerLaw {
            slope: 1.5,
            cutoff: 6.0,
        },
        Symmetry::Real,
        &mut rng,
    )?;

    let profile = u.norm_profile(&[0.0, 1.0, 2.0, 3.0, 4.0]);
    for (a, v) in profile.alphas.iter().zip(&profile.values) {
        println!("|A^({a}/2) u| = {v:.6e}");
    }
    let l = lebesgue_norms(&u);
    let lady = l.l4 / (u.norm().sqrt() * u.sobolev_norm(1.0).sqrt());
    let agm = l.linf_sampled / (u.norm().sqrt() * u.sobolev_norm(2.0).sqrt());
    println!(
        "L4 = {:.6e}, ratio to |u|^1/2 |A^1/2 u|^1/2 = {lady:.4} (c_L = {:.5})",
        l.l4,
        ladyzhenskaya()
    );
    println!(
        "Linf = {:.6e}, ratio to |u|^1/2 |Au|^1/2 = {agm:.4} (c_A = {:.5})",
        l.linf_sampled,
        agmon()
    );

    let psi = stream_function(&u);
    let back = from_stream_function(grid, &psi, Symmetry::Real)?;
    let err = back.axpy(C64::new(-1.0, 0.0), &u)?.norm() / u.norm();
    println!("velocity -> stream function -> velocity relative error {err:.2e}");

    let text = io::to_json(&u)?;
    let again = io::from_json(&text)?;
    println!("snapshot roundtrip exact: {}", again == u);
    Ok(())
}
