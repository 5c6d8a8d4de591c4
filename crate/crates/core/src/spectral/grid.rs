use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Truncation square `max(|k1|, |k2|) <= K` on the periodic box `[0, L]^2`,
/// together with the size `M` of the zero-padded transform grid.
///
/// Coefficients are stored densely in row-major order over `k1, k2 in [-K, K]`,
/// so the mode `-k` sits at the mirrored flat index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    length: f64,
    k_max: usize,
    padded: usize,
}

impl GridSpec {
    /// Grid with the smallest transform-friendly padding that dealiases quadratic products.
    pub fn new(length: f64, k_max: usize) -> Result<Self> {
        let padded = transform_friendly(min_dealiased(k_max));
        Self::with_padding(length, k_max, padded)
    }

    pub fn with_padding(length: f64, k_max: usize, padded: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        if k_max == 0 {
            return Err(Error::InvalidGrid("truncation K must be at least 1".into()));
        }
        if padded < min_dealiased(k_max) {
            return Err(Error::InvalidGrid(format!(
                "padded size {padded} is below {} needed to dealias K = {k_max}",
                min_dealiased(k_max)
            )));
        }
        Ok(Self {
            length,
            k_max,
            padded,
        })
    }

    /// Standard `2 pi`-periodic box.
    pub fn standard(k_max: usize) -> Result<Self> {
        Self::new(2.0 * PI, k_max)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn kappa0(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn padded(&self) -> usize {
        self.padded
    }

    /// Number of wavenumbers per axis, `2K + 1`.
    pub fn side(&self) -> usize {
        2 * self.k_max + 1
    }

    /// Number of stored modes, `(2K + 1)^2`.
    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of the mode `(k1, k2)`, or `None` outside the truncation square.
    pub fn index(&self, k1: i64, k2: i64) -> Option<usize> {
        let k = self.k_max as i64;
        if k1.abs() > k || k2.abs() > k {
            return None;
        }
        Some(((k1 + k) as usize) * self.side() + (k2 + k) as usize)
    }

    pub fn wavevector(&self, idx: usize) -> (i64, i64) {
        let k = self.k_max as i64;
        let side = self.side();
        ((idx / side) as i64 - k, (idx % side) as i64 - k)
    }

    /// Flat index of `-k` for the mode at `idx`.
    pub fn mirror(&self, idx: usize) -> usize {
        self.len() - 1 - idx
    }

    /// Flat index of `k = 0`.
    pub fn origin(&self) -> usize {
        self.len() / 2
    }

    /// Integer `|k|^2`.
    pub fn k_sq(&self, idx: usize) -> i64 {
        let (a, b) = self.wavevector(idx);
        a * a + b * b
    }

    /// Stokes eigenvalue `kappa0^2 |k|^2` of the mode at `idx`.
    pub fn eigenvalue(&self, idx: usize) -> f64 {
        self.kappa0().powi(2) * self.k_sq(idx) as f64
    }

    /// Padding size large enough that quartic products of truncated fields are
    /// resolved without aliasing.
    pub fn quartic_padding(&self) -> usize {
        transform_friendly(4 * self.k_max + 1)
    }

    pub(crate) fn same_as(&self, other: &GridSpec) -> bool {
        self.k_max == other.k_max && self.length == other.length
    }
}

/// Smallest padding `M` for which the retained modes of a quadratic product
/// of two truncated fields are free of aliasing.
pub fn min_dealiased(k_max: usize) -> usize {
    3 * k_max + 1
}

/// Smallest integer `>= n` whose prime factors are all in `{2, 3, 5}`.
pub fn transform_friendly(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_roundtrip_and_mirror() {
        let g = GridSpec::standard(5).unwrap();
        for idx in 0..g.len() {
            let (a, b) = g.wavevector(idx);
            assert_eq!(g.index(a, b), Some(idx));
            assert_eq!(g.wavevector(g.mirror(idx)), (-a, -b));
        }
        assert_eq!(g.wavevector(g.origin()), (0, 0));
        assert_eq!(g.index(6, 0), None);
    }

    #[test]
    fn padding_rules() {
        assert_eq!(transform_friendly(193), 200);
        assert_eq!(transform_friendly(25), 25);
        assert_eq!(transform_friendly(49), 50);
        let g = GridSpec::standard(64).unwrap();
        assert!(g.padded() > 3 * 64);
        assert!(GridSpec::with_padding(1.0, 8, 20).is_err());
        assert!(GridSpec::new(-1.0, 8).is_err());
        assert!(GridSpec::new(1.0, 0).is_err());
    }

    #[test]
    fn standard_box_has_unit_kappa() {
        let g = GridSpec::standard(4).unwrap();
        assert!((g.kappa0() - 1.0).abs() < 1e-15);
        let idx = g.index(3, 4).unwrap();
        assert_eq!(g.k_sq(idx), 25);
    }
}
