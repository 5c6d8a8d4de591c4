//! Zero-padded two-dimensional transforms between truncated coefficients
//! and samples on an `M x M` grid.
//!
//! Physical samples are kept in transposed order (`j2` major) because the
//! two passes only need one transpose each way. Pointwise products do not
//! care about the layout.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::field::C64;

pub struct PaddedTransform {
    k_max: usize,
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
    tmp: Vec<C64>,
}

impl PaddedTransform {
    pub fn new(k_max: usize, m: usize) -> Self {
        assert!(m > 2 * k_max, "padded size must exceed 2K");
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            k_max,
            m,
            forward,
            inverse,
            scratch: vec![C64::new(0.0, 0.0); scratch_len],
            tmp: vec![C64::new(0.0, 0.0); m * m],
        }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    /// Evaluates `sum_k c(k) exp(i kappa0 k . x)` on the padded grid.
    /// `spec` is a dense `(2K+1)^2` table; `out` receives `M^2` samples.
    pub fn synthesize(&mut self, spec: &[C64], out: &mut [C64]) {
        let (m, kk) = (self.m, self.k_max as i64);
        let side = 2 * self.k_max + 1;
        let wrap = |k: i64| k.rem_euclid(m as i64) as usize;
        debug_assert_eq!(spec.len(), side * side);
        debug_assert_eq!(out.len(), m * m);
        self.tmp.fill(C64::new(0.0, 0.0));
        for a in 0..side {
            let r = wrap(a as i64 - kk);
            let row = &mut self.tmp[r * m..(r + 1) * m];
            for b in 0..side {
                row[wrap(b as i64 - kk)] = spec[a * side + b];
            }
            self.inverse.process_with_scratch(row, &mut self.scratch);
        }
        transpose(&self.tmp, out, m);
        self.inverse.process_with_scratch(out, &mut self.scratch);
    }

    /// Inverse of [`synthesize`](Self::synthesize) restricted to the truncation
    /// square. `phys` is used as workspace and overwritten.
    pub fn analyze(&mut self, phys: &mut [C64], spec: &mut [C64]) {
        let (m, kk) = (self.m, self.k_max as i64);
        let side = 2 * self.k_max + 1;
        let wrap = |k: i64| k.rem_euclid(m as i64) as usize;
        self.forward.process_with_scratch(phys, &mut self.scratch);
        transpose(phys, &mut self.tmp, m);
        let norm = 1.0 / (m * m) as f64;
        for a in 0..side {
            let r = wrap(a as i64 - kk);
            let row = &mut self.tmp[r * m..(r + 1) * m];
            self.forward.process_with_scratch(row, &mut self.scratch);
            for b in 0..side {
                spec[a * side + b] = row[wrap(b as i64 - kk)] * norm;
            }
        }
    }
}

fn transpose(src: &[C64], dst: &mut [C64], m: usize) {
    const BLOCK: usize = 16;
    for i0 in (0..m).step_by(BLOCK) {
        for j0 in (0..m).step_by(BLOCK) {
            for i in i0..(i0 + BLOCK).min(m) {
                for j in j0..(j0 + BLOCK).min(m) {
                    dst[j * m + i] = src[i * m + j];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn synthesize_matches_direct_sum() {
        let (k, m) = (3usize, 10usize);
        let side = 2 * k + 1;
        let spec: Vec<C64> = (0..side * side)
            .map(|i| C64::new((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let mut t = PaddedTransform::new(k, m);
        let mut out = vec![C64::new(0.0, 0.0); m * m];
        t.synthesize(&spec, &mut out);
        for j1 in 0..m {
            for j2 in 0..m {
                let mut s = C64::new(0.0, 0.0);
                for a in 0..side {
                    for b in 0..side {
                        let (k1, k2) = (a as f64 - k as f64, b as f64 - k as f64);
                        let ph = 2.0 * PI * (k1 * j1 as f64 + k2 * j2 as f64) / m as f64;
                        s += spec[a * side + b] * C64::new(ph.cos(), ph.sin());
                    }
                }
                assert!((s - out[j2 * m + j1]).norm() < 1e-12);
            }
        }
        let mut back = vec![C64::new(0.0, 0.0); side * side];
        t.analyze(&mut out, &mut back);
        for (a, b) in back.iter().zip(&spec) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
