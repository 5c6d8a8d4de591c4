use serde::{Deserialize, Serialize};

use super::field::{SpectralField, C64};
use super::grid::transform_friendly;
use super::transform::PaddedTransform;

/// `L^4` norm and a sampled `L^inf` norm of a field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LebesgueNorms {
    /// Exact for truncated fields: the quartic integrand is resolved on a grid of size `>= 4K + 1`.
    pub l4: f64,
    /// Maximum of `|u(x)|` over a grid of spacing `L / M` with `M >= 8K`; never exceeds the true supremum.
    pub linf_sampled: f64,
}

pub fn lebesgue_norms(u: &SpectralField) -> LebesgueNorms {
    let grid = u.grid();
    let k = grid.k_max();
    let quartic = sampled_magnitudes(u, grid.quartic_padding());
    let mean4 = quartic.iter().map(|&s| s * s).sum::<f64>() / quartic.len() as f64;
    let l4 = (grid.length().powi(2) * mean4).powf(0.25);
    let fine = sampled_magnitudes(u, transform_friendly(8 * k));
    let linf_sampled = fine.iter().cloned().fold(0.0, f64::max).sqrt();
    LebesgueNorms { l4, linf_sampled }
}

/// `|u1|^2 + |u2|^2` at the points of an `m x m` grid.
fn sampled_magnitudes(u: &SpectralField, m: usize) -> Vec<f64> {
    let k = u.grid().k_max();
    let mut t = PaddedTransform::new(k, m);
    let mut out = vec![0.0; m * m];
    let mut phys = vec![C64::new(0.0, 0.0); m * m];
    for comp in 0..2 {
        let spec: Vec<C64> = u.coeffs().iter().map(|c| c[comp]).collect();
        t.synthesize(&spec, &mut phys);
        for (o, p) in out.iter_mut().zip(&phys) {
            *o += p.norm_sqr();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{GridSpec, Symmetry};
    use std::f64::consts::PI;

    #[test]
    fn single_mode_lebesgue_norms() {
        // u = (cos x2, 0): |u|^4 integrates to (2 pi)^2 * 3/8.
        let g = GridSpec::standard(3).unwrap();
        let h = C64::new(0.5, 0.0);
        let u = SpectralField::from_modes(g, &[((0, 1), [h, C64::new(0.0, 0.0)])], Symmetry::Real)
            .unwrap();
        let n = lebesgue_norms(&u);
        assert!((n.l4 - (4.0 * PI * PI * 0.375).powf(0.25)).abs() < 1e-13);
        assert!((n.linf_sampled - 1.0).abs() < 1e-13);
    }
}
