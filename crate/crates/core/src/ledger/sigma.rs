//! Propagation of a Gevrey-type class of the force to the attractor:
//! `g in C(sigma)` gives `A` in `C(sigma_3)`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::base::{ln_gamma_with, LedgerConstants};
use super::logmath::{ln0, log_add, log_sum};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaPipeline {
    pub sigma: f64,
    pub c0: f64,
    /// `ln c_1 .. ln c_7`.
    pub c_ln: [f64; 7],
    /// `ln gamma_1 .. ln gamma_3`.
    pub gamma_ln: [f64; 3],
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    /// First order from which the recursive class estimate applies.
    pub alpha1: i64,
    /// `ln M_1 .. ln M_4`.
    pub m_ln: [f64; 4],
}

/// Runs the constant chain for `g in C(sigma)` with class constant `c0`.
///
/// `M_1, M_2, M_3` and `delta_3` are the strip seeds of `c`; `M_4` follows from
/// `M_{alpha+1} = 8 sqrt2 / pi (M_alpha^2 / (nu kappa0^2 delta_alpha) + 4 G_{alpha-1}^2 + sqrt2 Gamma_alpha M_alpha^2)^{1/2}`
/// with the `M`-based `Gamma_3`. `G_2` is taken from `c.grashof_alpha` when known and
/// otherwise from its strip bound `R~_2 / (nu kappa0^2 delta_2)`.
pub fn sigma_propagation(sigma: f64, c0: f64, c: &LedgerConstants) -> Result<SigmaPipeline> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if !(c0.is_finite() && c0 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "c0 must be nonnegative, got {c0}"
        )));
    }
    let ln2 = 2f64.ln();
    let ln4 = 4f64.ln();
    let ca = c.c_a;
    let [m1, m2, m3] = c.strip_radius;
    let d3 = c.scaled_delta(3);
    let g2 = c
        .grashof_alpha
        .get(2)
        .copied()
        .unwrap_or_else(|| m2 / c.scaled_delta(2));
    let gamma3_ln = ln_gamma_with(3, m1, m2, m3, c.c_l, ca);
    let m4_ln = (8.0 * SQRT_2 / PI).ln()
        + 0.5
            * log_sum(&[
                2.0 * m3.ln() - d3.ln(),
                4f64.ln() + 2.0 * ln0(g2),
                0.5 * ln2 + gamma3_ln + 2.0 * m3.ln(),
            ]);

    let c1 = 0.5 * ln0(c0) + 4.0 * sigma;
    let c2 = 0.5 * ln2 + ca.ln() + ln0(c0) + sigma * (1.0 + (2.0 + ln4 / sigma).powi(2) / 8.0);
    let c3 = log_add(c1, c2);
    let shared = 4.0 * ca * ca * m1 * m2 + ca * (m1 * m3).sqrt();
    let c4 = (128.0 / (PI * PI)).ln() + (1.0 / d3 + 1.0 / (d3 * d3) + shared).ln();
    let c5 = (256.0 / (PI * PI)).ln() + 2.0 * c3;
    let sigma1 = ln4 + 2.0 * sigma;
    let gamma1 = log_add(2.0 * m4_ln, ln2 + c5) - 4.0 * c4
        + 8.0 * sigma
        + (c4 - 4.0 * ln4 - 8.0 * sigma) / (4.0 * sigma1);
    let gamma2 = log_add(
        gamma1 - 5.0 * ln2 + ln4 * ln4 / (4.0 * sigma1) - 2.0 * d3.ln(),
        ln2 + 2.0 * c3,
    );
    let sigma2 = (3.0 * sigma1).max(2.0 * sigma);
    let c6 = (128.0 / (PI * PI)).ln() + (1.0 / d3 + shared).ln();
    let c7 = (128.0 / (PI * PI)).ln() + gamma2;
    let sigma3 = 2.0 * ln4 + 2.0 * sigma2;
    let gamma3 = log_add(2.0 * m4_ln, ln2 + c7) - 4.0 * c6
        + 4.0 * sigma2
        + (c6 - 4.0 * ln4 - 4.0 * sigma2) / (2.0 * sigma3);
    let alpha1 = (((ln2 - c4) / ln4).floor() as i64 + 1).max(4);

    Ok(SigmaPipeline {
        sigma,
        c0,
        c_ln: [c1, c2, c3, c4, c5, c6, c7],
        gamma_ln: [gamma1, gamma2, gamma3],
        sigma1,
        sigma2,
        sigma3,
        alpha1,
        m_ln: [m1.ln(), m2.ln(), m3.ln(), m4_ln],
    })
}
