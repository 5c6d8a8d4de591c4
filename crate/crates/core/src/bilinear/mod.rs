//! The nonlinear term `B(u, v) = P((u . grad) v)` evaluated two independent
//! ways, plus the identity and inequality checks built on it.

mod checks;

pub use checks::{
    conjugate_field, identity_residuals, inequality_ratio, run_suite, suite_csv, IdentityKind,
    IdentityResidual, Inequality, InequalityRatio, SuiteConfig, SuiteRecord, SuiteReport,
};

use crate::error::{Error, Result};
use crate::spectral::transform::PaddedTransform;
use crate::spectral::{
    inner_raw, project_raw, symmetrize_raw, GridSpec, Mode, SpectralField, Symmetry, C64, ZERO,
};

/// Reusable buffers for the padded-transform evaluation of `B`.
pub struct BilinearWorkspace {
    grid: GridSpec,
    transform: PaddedTransform,
    u_phys: [Vec<C64>; 2],
    grad: Vec<C64>,
    acc: Vec<C64>,
    spec: Vec<C64>,
}

impl BilinearWorkspace {
    pub fn new(grid: &GridSpec) -> Self {
        let m2 = grid.padded() * grid.padded();
        let zero = C64::new(0.0, 0.0);
        Self {
            grid: *grid,
            transform: PaddedTransform::new(grid.k_max(), grid.padded()),
            u_phys: [vec![zero; m2], vec![zero; m2]],
            grad: vec![zero; m2],
            acc: vec![zero; m2],
            spec: vec![zero; grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Writes the truncated, projected coefficients of `(u . grad) v` into `out`.
    pub fn apply(&mut self, u: &[Mode], v: &[Mode], out: &mut [Mode]) {
        let g = self.grid;
        let n = g.len();
        debug_assert!(u.len() == n && v.len() == n && out.len() == n);
        for d in 0..2 {
            for (s, m) in self.spec.iter_mut().zip(u) {
                *s = m[d];
            }
            self.transform.synthesize(&self.spec, &mut self.u_phys[d]);
        }
        let ik0 = C64::new(0.0, g.kappa0());
        for c in 0..2 {
            self.acc.fill(C64::new(0.0, 0.0));
            for d in 0..2 {
                for (idx, (s, m)) in self.spec.iter_mut().zip(v).enumerate() {
                    let (a, b) = g.wavevector(idx);
                    let kd = if d == 0 { a } else { b };
                    *s = ik0 * kd as f64 * m[c];
                }
                self.transform.synthesize(&self.spec, &mut self.grad);
                for ((acc, up), gr) in self.acc.iter_mut().zip(&self.u_phys[d]).zip(&self.grad) {
                    *acc += up * gr;
                }
            }
            self.transform.analyze(&mut self.acc, &mut self.spec);
            for (o, s) in out.iter_mut().zip(&self.spec) {
                o[c] = *s;
            }
        }
        project_raw(&g, out);
    }

    /// `B(u, v)` as a field; real inputs give a conjugate-symmetric result.
    /// `B(u, u)` through the rotational form `P[omega (-u_2, u_1)]`, with
    /// `omega = d_1 u_2 - d_2 u_1`: five transforms instead of eight.
    pub fn apply_self(&mut self, u: &[Mode], out: &mut [Mode]) {
        let g = self.grid;
        debug_assert!(u.len() == g.len() && out.len() == g.len());
        for d in 0..2 {
            for (s, m) in self.spec.iter_mut().zip(u) {
                *s = m[d];
            }
            self.transform.synthesize(&self.spec, &mut self.u_phys[d]);
        }
        let ik0 = C64::new(0.0, g.kappa0());
        for (idx, (s, m)) in self.spec.iter_mut().zip(u).enumerate() {
            let (a, b) = g.wavevector(idx);
            *s = ik0 * (m[1] * a as f64 - m[0] * b as f64);
        }
        self.transform.synthesize(&self.spec, &mut self.grad);
        for c in 0..2 {
            let (src, sign) = if c == 0 {
                (&self.u_phys[1], -1.0)
            } else {
                (&self.u_phys[0], 1.0)
            };
            for ((acc, w), v) in self.acc.iter_mut().zip(&self.grad).zip(src) {
                *acc = w * v * sign;
            }
            self.transform.analyze(&mut self.acc, &mut self.spec);
            for (o, s) in out.iter_mut().zip(&self.spec) {
                o[c] = *s;
            }
        }
        project_raw(&g, out);
    }

    pub fn eval(&mut self, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
        u.check_grid(v)?;
        if !u.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let mut out = vec![ZERO; self.grid.len()];
        self.apply(u.coeffs(), v.coeffs(), &mut out);
        let symmetry = result_symmetry(u, v);
        if symmetry == Symmetry::Real {
            symmetrize_raw(&self.grid, &mut out);
        }
        Ok(SpectralField::from_coeffs_unchecked(
            self.grid, out, symmetry,
        ))
    }
}

fn result_symmetry(u: &SpectralField, v: &SpectralField) -> Symmetry {
    if u.symmetry() == Symmetry::Real && v.symmetry() == Symmetry::Real {
        Symmetry::Real
    } else {
        Symmetry::Complex
    }
}

/// `B(u, v)` through zero-padded transforms.
pub fn bilinear_fft(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    BilinearWorkspace::new(u.grid()).eval(u, v)
}

/// `B(u, v)` by explicit convolution over all triads `h + j = k` inside the
/// truncation square. Quartic in `K`; intended as a reference.
pub fn bilinear_direct(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.check_grid(v)?;
    let g = *u.grid();
    let kk = g.k_max() as i64;
    let k0 = g.kappa0();
    let (uc, vc) = (u.coeffs(), v.coeffs());
    let mut out = vec![ZERO; g.len()];
    for (hidx, uh) in uc.iter().enumerate() {
        if uh[0].norm_sqr() + uh[1].norm_sqr() == 0.0 {
            continue;
        }
        let (h1, h2) = g.wavevector(hidx);
        for j1 in (-kk).max(-kk - h1)..=kk.min(kk - h1) {
            for j2 in (-kk).max(-kk - h2)..=kk.min(kk - h2) {
                let vj = vc[g.index(j1, j2).expect("in range")];
                let t = C64::new(0.0, k0) * (uh[0] * j1 as f64 + uh[1] * j2 as f64);
                let o = &mut out[g.index(h1 + j1, h2 + j2).expect("in range")];
                o[0] += t * vj[0];
                o[1] += t * vj[1];
            }
        }
    }
    project_raw(&g, &mut out);
    let symmetry = result_symmetry(u, v);
    if symmetry == Symmetry::Real {
        symmetrize_raw(&g, &mut out);
    }
    Ok(SpectralField::from_coeffs_unchecked(g, out, symmetry))
}

/// `(B(u, v), w)` with the complex inner product.
pub fn trilinear(
    ws: &mut BilinearWorkspace,
    u: &SpectralField,
    v: &SpectralField,
    w: &SpectralField,
) -> Result<C64> {
    let b = ws.eval(u, v)?;
    b.check_grid(w)?;
    Ok(inner_raw(b.grid(), b.coeffs(), w.coeffs()))
}
