use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use crate::error::{Error, Result};

pub type C64 = Complex64;
/// Fourier coefficient of a planar vector field at one wavevector.
pub type Mode = [C64; 2];

pub(crate) const ZERO: Mode = [C64::new(0.0, 0.0), C64::new(0.0, 0.0)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    /// `u(-k) = conj(u(k))`: the field is real in physical space.
    Real,
    /// Complexified field, no conjugate symmetry.
    Complex,
}

/// Truncated Fourier representation of a mean-zero, divergence-free field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Mode>,
    symmetry: Symmetry,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, symmetry: Symmetry) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO; grid.len()],
            symmetry,
        }
    }

    /// Wraps a coefficient table after checking mean, divergence and symmetry.
    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Mode>, symmetry: Symmetry) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Invariant(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let f = Self {
            grid,
            coeffs,
            symmetry,
        };
        f.validate(1e-12)?;
        Ok(f)
    }

    pub(crate) fn from_coeffs_unchecked(
        grid: GridSpec,
        coeffs: Vec<Mode>,
        symmetry: Symmetry,
    ) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self {
            grid,
            coeffs,
            symmetry,
        }
    }

    /// Builds a field from a sparse list of modes. For real fields the
    /// conjugate partner of each listed mode is filled in.
    pub fn from_modes(
        grid: GridSpec,
        modes: &[((i64, i64), Mode)],
        symmetry: Symmetry,
    ) -> Result<Self> {
        let mut coeffs = vec![ZERO; grid.len()];
        for &((k1, k2), c) in modes {
            let idx = grid.index(k1, k2).ok_or_else(|| {
                Error::InvalidArgument(format!("mode ({k1}, {k2}) outside truncation"))
            })?;
            coeffs[idx] = c;
            if symmetry == Symmetry::Real {
                coeffs[grid.mirror(idx)] = [c[0].conj(), c[1].conj()];
            }
        }
        Self::from_coeffs(grid, coeffs, symmetry)
    }

    /// Checks zero mean, `k . u(k) = 0` and, for real fields, conjugate symmetry,
    /// all relative to the largest coefficient.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let scale = self
            .coeffs
            .iter()
            .map(|m| m[0].norm().max(m[1].norm()))
            .fold(0.0, f64::max);
        let abs_tol = tol * scale.max(f64::MIN_POSITIVE);
        let o = self.coeffs[self.grid.origin()];
        if o[0].norm() > abs_tol || o[1].norm() > abs_tol {
            return Err(Error::Invariant("nonzero mean".into()));
        }
        for (idx, m) in self.coeffs.iter().enumerate() {
            if !(m[0].re.is_finite()
                && m[0].im.is_finite()
                && m[1].re.is_finite()
                && m[1].im.is_finite())
            {
                return Err(Error::Invariant("non-finite coefficient".into()));
            }
            let (a, b) = self.grid.wavevector(idx);
            let kmag = ((a * a + b * b) as f64).sqrt();
            let div = m[0] * a as f64 + m[1] * b as f64;
            if div.norm() > abs_tol * kmag.max(1.0) {
                return Err(Error::Invariant(format!("divergence at ({a}, {b})")));
            }
            if self.symmetry == Symmetry::Real {
                let p = self.coeffs[self.grid.mirror(idx)];
                if (m[0] - p[0].conj()).norm() > abs_tol || (m[1] - p[1].conj()).norm() > abs_tol {
                    return Err(Error::Invariant(format!(
                        "conjugate symmetry broken at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn coeffs(&self) -> &[Mode] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Mode> {
        self.coeffs
    }

    pub fn coeff(&self, k1: i64, k2: i64) -> Option<Mode> {
        self.grid.index(k1, k2).map(|i| self.coeffs[i])
    }

    /// Reinterprets a real field as a complexified one.
    pub fn complexify(mut self) -> Self {
        self.symmetry = Symmetry::Complex;
        self
    }

    /// Sobolev-type norm `|A^{alpha/2} u| = L (sum (kappa0^2 |k|^2)^alpha |u(k)|^2)^{1/2}`.
    pub fn sobolev_norm(&self, alpha: f64) -> f64 {
        self.grid.length() * weighted_sum(&self.grid, &self.coeffs, alpha).sqrt()
    }

    /// `L^2` norm, `|u|`.
    pub fn norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    pub fn norm_profile(&self, alphas: &[f64]) -> NormProfile {
        NormProfile {
            alphas: alphas.to_vec(),
            values: alphas.iter().map(|&a| self.sobolev_norm(a)).collect(),
        }
    }

    /// Applies `A^sigma` mode by mode.
    pub fn apply_power(&self, sigma: f64) -> Self {
        let mut out = self.clone();
        for (idx, m) in out.coeffs.iter_mut().enumerate() {
            let lam = self.grid.eigenvalue(idx);
            if lam == 0.0 {
                continue;
            }
            let s = lam.powf(sigma);
            m[0] *= s;
            m[1] *= s;
        }
        out
    }

    /// Complex inner product `(u, v) = L^2 sum u(k) . conj(v(k))`.
    pub fn inner(&self, other: &SpectralField) -> Result<C64> {
        self.check_grid(other)?;
        Ok(inner_raw(&self.grid, &self.coeffs, &other.coeffs))
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        for m in out.coeffs.iter_mut() {
            m[0] *= s;
            m[1] *= s;
        }
        if s.im != 0.0 {
            out.symmetry = Symmetry::Complex;
        }
        out
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &SpectralField) -> Result<Self> {
        self.check_grid(other)?;
        let mut out = self.clone();
        for (m, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            m[0] += s * o[0];
            m[1] += s * o[1];
        }
        if s.im != 0.0 || other.symmetry == Symmetry::Complex {
            out.symmetry = Symmetry::Complex;
        }
        Ok(out)
    }

    /// Rescales so that `|A^{alpha/2} u|` equals `target`.
    pub fn normalized(&self, alpha: f64, target: f64) -> Result<Self> {
        let n = self.sobolev_norm(alpha);
        if n == 0.0 {
            return Err(Error::Degenerate("cannot normalize the zero field".into()));
        }
        Ok(self.scaled(C64::new(target / n, 0.0)))
    }

    /// Projects onto conjugate-symmetric coefficients and marks the field real.
    pub fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        symmetrize_raw(&self.grid, &mut out.coeffs);
        out.symmetry = Symmetry::Real;
        out
    }

    /// Energy `L^2 sum |u(k)|^2` grouped by integer `|k|^2`, in increasing order.
    pub fn shell_energies(&self) -> Vec<(i64, f64)> {
        let mut shells = std::collections::BTreeMap::new();
        let l2 = self.grid.length().powi(2);
        for (idx, m) in self.coeffs.iter().enumerate() {
            let e = m[0].norm_sqr() + m[1].norm_sqr();
            if idx == self.grid.origin() || e == 0.0 {
                continue;
            }
            *shells.entry(self.grid.k_sq(idx)).or_insert(0.0) += l2 * e;
        }
        shells.into_iter().collect()
    }

    pub(crate) fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Sobolev-norm samples `|A^{alpha/2} u|` at a list of exponents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormProfile {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
}

pub(crate) fn weighted_sum(grid: &GridSpec, coeffs: &[Mode], alpha: f64) -> f64 {
    let k2 = grid.kappa0().powi(2);
    let mut s = 0.0;
    for (idx, m) in coeffs.iter().enumerate() {
        let ksq = grid.k_sq(idx);
        if ksq == 0 {
            continue;
        }
        let e = m[0].norm_sqr() + m[1].norm_sqr();
        if e == 0.0 {
            continue;
        }
        s += if alpha == 0.0 {
            e
        } else {
            (k2 * ksq as f64).powf(alpha) * e
        };
    }
    s
}

pub(crate) fn inner_raw(grid: &GridSpec, a: &[Mode], b: &[Mode]) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        s += x[0] * y[0].conj() + x[1] * y[1].conj();
    }
    s * grid.length().powi(2)
}

pub(crate) fn symmetrize_raw(grid: &GridSpec, coeffs: &mut [Mode]) {
    let n = grid.len();
    for idx in 0..n / 2 {
        let j = grid.mirror(idx);
        let a = coeffs[idx];
        let b = coeffs[j];
        let s0 = (a[0] + b[0].conj()) * 0.5;
        let s1 = (a[1] + b[1].conj()) * 0.5;
        coeffs[idx] = [s0, s1];
        coeffs[j] = [s0.conj(), s1.conj()];
    }
    coeffs[grid.origin()] = ZERO;
}

/// Removes the gradient part of each mode, `v - k (k . v) / |k|^2`, in place.
pub(crate) fn project_raw(grid: &GridSpec, coeffs: &mut [Mode]) {
    for (idx, m) in coeffs.iter_mut().enumerate() {
        let (a, b) = grid.wavevector(idx);
        let ksq = (a * a + b * b) as f64;
        if ksq == 0.0 {
            *m = ZERO;
            continue;
        }
        let (a, b) = (a as f64, b as f64);
        let dot = (m[0] * a + m[1] * b) / ksq;
        m[0] -= dot * a;
        m[1] -= dot * b;
    }
}

/// Leray projection of a mean-zero vector coefficient table onto divergence-free fields.
pub fn leray_project(grid: GridSpec, raw: &[Mode], symmetry: Symmetry) -> Result<SpectralField> {
    if raw.len() != grid.len() {
        return Err(Error::InvalidArgument(
            "coefficient table has the wrong size".into(),
        ));
    }
    let o = raw[grid.origin()];
    let scale = raw
        .iter()
        .map(|m| m[0].norm().max(m[1].norm()))
        .fold(0.0, f64::max);
    if o[0].norm() > 1e-14 * scale || o[1].norm() > 1e-14 * scale {
        return Err(Error::Invariant("projection input has nonzero mean".into()));
    }
    let mut coeffs = raw.to_vec();
    project_raw(&grid, &mut coeffs);
    Ok(SpectralField {
        grid,
        coeffs,
        symmetry,
    })
}

/// Stream function coefficients, with `u1 = d psi / dx2` and `u2 = -d psi / dx1`.
pub fn stream_function(u: &SpectralField) -> Vec<C64> {
    let grid = u.grid();
    let k0 = grid.kappa0();
    u.coeffs()
        .iter()
        .enumerate()
        .map(|(idx, m)| {
            let (a, b) = grid.wavevector(idx);
            let ksq = (a * a + b * b) as f64;
            if ksq == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let curl = m[0] * b as f64 - m[1] * a as f64;
            -C64::i() * curl / (k0 * ksq)
        })
        .collect()
}

/// Velocity field generated by a stream function, `u = (d psi/dx2, -d psi/dx1)`.
pub fn from_stream_function(
    grid: GridSpec,
    psi: &[C64],
    symmetry: Symmetry,
) -> Result<SpectralField> {
    if psi.len() != grid.len() {
        return Err(Error::InvalidArgument(
            "stream table has the wrong size".into(),
        ));
    }
    let ik0 = C64::new(0.0, grid.kappa0());
    let coeffs = psi
        .iter()
        .enumerate()
        .map(|(idx, &p)| {
            let (a, b) = grid.wavevector(idx);
            if a == 0 && b == 0 {
                return ZERO;
            }
            [ik0 * b as f64 * p, -ik0 * a as f64 * p]
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs, symmetry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn single_mode_norms() {
        // u = (cos x2, 0): coefficients 1/2 at k = (0, +-1).
        let g = GridSpec::standard(4).unwrap();
        let u =
            SpectralField::from_modes(g, &[((0, 1), [c(0.5, 0.0), c(0.0, 0.0)])], Symmetry::Real)
                .unwrap();
        assert!((u.norm().powi(2) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((u.sobolev_norm(1.0) - u.norm()).abs() < 1e-12);
    }

    #[test]
    fn stream_function_example() {
        // psi = sin(x1) gives u = (0, -cos(x1)).
        let g = GridSpec::standard(3).unwrap();
        let mut psi = vec![c(0.0, 0.0); g.len()];
        psi[g.index(1, 0).unwrap()] = c(0.0, -0.5);
        psi[g.index(-1, 0).unwrap()] = c(0.0, 0.5);
        let u = from_stream_function(g, &psi, Symmetry::Real).unwrap();
        let m = u.coeff(1, 0).unwrap();
        assert!(m[0].norm() < 1e-15);
        assert!((m[1] - c(-0.5, 0.0)).norm() < 1e-15);
        let back = stream_function(&u);
        for (a, b) in back.iter().zip(&psi) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn projection_removes_gradients() {
        let g = GridSpec::standard(2).unwrap();
        let mut raw = vec![ZERO; g.len()];
        raw[g.index(1, 1).unwrap()] = [c(1.0, 0.0), c(1.0, 0.0)];
        raw[g.index(1, 0).unwrap()] = [c(0.0, 1.0), c(2.0, 0.0)];
        let p = leray_project(g, &raw, Symmetry::Complex).unwrap();
        let m = p.coeff(1, 1).unwrap();
        assert!(m[0].norm() < 1e-15 && m[1].norm() < 1e-15);
        assert_eq!(p.coeff(1, 0).unwrap(), [c(0.0, 0.0), c(2.0, 0.0)]);
        raw[g.origin()] = [c(1.0, 0.0), c(0.0, 0.0)];
        assert!(leray_project(g, &raw, Symmetry::Complex).is_err());
    }

    #[test]
    fn invariants_are_checked() {
        let g = GridSpec::standard(2).unwrap();
        let bad =
            SpectralField::from_modes(g, &[((1, 0), [c(1.0, 0.0), c(0.0, 0.0)])], Symmetry::Real);
        assert!(bad.is_err());
        let mut coeffs = vec![ZERO; g.len()];
        coeffs[g.index(1, 0).unwrap()] = [c(0.0, 0.0), c(1.0, 0.0)];
        assert!(SpectralField::from_coeffs(g, coeffs.clone(), Symmetry::Real).is_err());
        assert!(SpectralField::from_coeffs(g, coeffs, Symmetry::Complex).is_ok());
    }
}
