use nse_lab::dynamics::{integrate_real, IntegratorConfig, PhysicalSetup};
use nse_lab::spectral::GridSpec;
fn main() {
    let setup = PhysicalSetup::kolmogorov(GridSpec::standard(64).unwrap(), 1.0, 2, 5.0).unwrap();
    println!("M = {}", setup.grid().padded());
    let u0 =
        nse_lab::spectral::SpectralField::zeros(*setup.grid(), nse_lab::spectral::Symmetry::Real);
    let cfg = IntegratorConfig {
        dt: 0.01,
        ..IntegratorConfig::default_for(&setup)
    };
    let t = std::time::Instant::now();
    integrate_real(&u0, &setup, 1.0, &cfg).unwrap();
    println!("100 steps {:?}", t.elapsed());
}
