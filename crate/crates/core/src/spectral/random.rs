//! Random divergence-free fields with prescribed spectral envelopes.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::field::{project_raw, Mode, SpectralField, Symmetry, C64, ZERO};
use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Spectral envelope of a random field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldFamily {
    /// `|u(k)| ~ |k|^{-slope} exp(-|k| / cutoff)`.
    PowerLaw { slope: f64, cutoff: f64 },
    /// Flat amplitudes on `k_lo <= |k| <= k_hi`.
    WhiteInShell { k_lo: f64, k_hi: f64 },
    /// All energy on one shell `|k|^2 = k_sq`.
    SingleShell { k_sq: i64 },
}

impl FieldFamily {
    fn envelope(&self, k_sq: i64) -> f64 {
        let k = (k_sq as f64).sqrt();
        match *self {
            FieldFamily::PowerLaw { slope, cutoff } => k.powf(-slope) * (-k / cutoff).exp(),
            FieldFamily::WhiteInShell { k_lo, k_hi } => {
                if k >= k_lo && k <= k_hi {
                    1.0
                } else {
                    0.0
                }
            }
            FieldFamily::SingleShell { k_sq: s } => {
                if k_sq == s {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Draws a field with Gaussian coefficients shaped by `family`, projected to be
/// divergence-free and, for [`Symmetry::Real`], conjugate symmetric.
pub fn random_field<R: Rng + ?Sized>(
    grid: GridSpec,
    family: FieldFamily,
    symmetry: Symmetry,
    rng: &mut R,
) -> Result<SpectralField> {
    let mut coeffs = vec![ZERO; grid.len()];
    let limit = match symmetry {
        Symmetry::Real => grid.origin(),
        Symmetry::Complex => grid.len(),
    };
    for (idx, slot) in coeffs.iter_mut().enumerate().take(limit) {
        let ksq = grid.k_sq(idx);
        if ksq == 0 {
            continue;
        }
        let amp = family.envelope(ksq);
        if amp == 0.0 {
            continue;
        }
        *slot = [gaussian(rng) * amp, gaussian(rng) * amp];
    }
    if symmetry == Symmetry::Real {
        for idx in 0..grid.origin() {
            let m = coeffs[idx];
            coeffs[grid.mirror(idx)] = [m[0].conj(), m[1].conj()];
        }
    }
    project_raw(&grid, &mut coeffs);
    if coeffs
        .iter()
        .all(|m: &Mode| m[0].norm() == 0.0 && m[1].norm() == 0.0)
    {
        return Err(Error::Degenerate(format!(
            "{family:?} has no modes on this grid"
        )));
    }
    Ok(SpectralField::from_coeffs_unchecked(grid, coeffs, symmetry))
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Integer `|k|^2` values realized inside the truncation square, sorted.
pub fn available_shells(grid: &GridSpec) -> Vec<i64> {
    let mut v: Vec<i64> = (0..grid.len())
        .map(|i| grid.k_sq(i))
        .filter(|&s| s > 0)
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_fields_satisfy_invariants() {
        let g = GridSpec::standard(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for sym in [Symmetry::Real, Symmetry::Complex] {
            for fam in [
                FieldFamily::PowerLaw {
                    slope: 1.5,
                    cutoff: 3.0,
                },
                FieldFamily::WhiteInShell {
                    k_lo: 2.0,
                    k_hi: 4.0,
                },
                FieldFamily::SingleShell { k_sq: 5 },
            ] {
                let u = random_field(g, fam, sym, &mut rng).unwrap();
                u.validate(1e-13).unwrap();
            }
        }
        let shells = random_field(
            g,
            FieldFamily::SingleShell { k_sq: 25 },
            Symmetry::Real,
            &mut rng,
        )
        .unwrap()
        .shell_energies();
        assert_eq!(shells.len(), 1);
        assert!(random_field(
            g,
            FieldFamily::SingleShell { k_sq: 3 },
            Symmetry::Real,
            &mut rng
        )
        .is_err());
    }
}
