//! Seed constants of the analyticity-strip estimates for `alpha = 1, 2, 3`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::logmath::{ln0, log_add};
use crate::constants::{agmon, ladyzhenskaya, single_point_threshold};
use crate::dynamics::PhysicalSetup;
use crate::error::{Error, Result};

/// Strip widths and radii for `alpha <= 3`, together with the inputs they depend on.
///
/// Strip widths are physical times; radii are normalized by `nu kappa0^alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerConstants {
    pub c_l: f64,
    pub c_a: f64,
    pub nu: f64,
    pub kappa0: f64,
    pub grashof: f64,
    /// `G_alpha = |A^{alpha/2} g| / (nu^2 kappa0^{alpha+2})` for `alpha = 0, 1, ...`, when the force is known.
    pub grashof_alpha: Vec<f64>,
    pub delta: [f64; 3],
    /// Complex-strip radii `R~_1, R~_2, R~_3`.
    pub strip_radius: [f64; 3],
    /// Real-axis radii `R_1, R_2, R_3`.
    pub real_radius: [f64; 3],
    pub n2: f64,
    pub n3: f64,
    /// `G >= c_L^{-2}`: the regime in which the radius constants are derived.
    pub standing_assumption: bool,
}

impl LedgerConstants {
    pub fn new(nu: f64, kappa0: f64, grashof: f64) -> Result<Self> {
        if !(nu > 0.0 && kappa0 > 0.0 && nu.is_finite() && kappa0.is_finite()) {
            return Err(Error::InvalidArgument(
                "nu and kappa0 must be positive".into(),
            ));
        }
        if !(grashof.is_finite() && grashof > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Grashof number must be positive, got {grashof}"
            )));
        }
        let cl = ladyzhenskaya();
        let ca = agmon();
        let g = grashof;
        let tau = nu * kappa0 * kappa0;
        let cl8 = cl.powi(8);
        let k = 2.0 * cl * cl + ca;

        let d1 = 1.0 / (16.0 * 24f64.powi(3) * cl8 * g.powi(4));
        let rt1 = SQRT_2 * g;
        let r1 = g;
        let r2 = 2137.0 * g.powi(3) * cl.powi(4);

        let t1 = k.powf(8.0 / 3.0) * rt1.powf(8.0 / 3.0) * (1.0 / (8.0 * d1 * d1)).powf(2.0 / 3.0);
        let t2 = k.powi(4) * rt1 * rt1 * r2 * r2;
        let d2 = d1.min((t1 + t2).powf(-0.5) / 16.0);

        let lead = (SQRT_2 * 16f64.powi(2) * 24f64.powi(6) * cl.powi(16)).powf(2.0 / 3.0);
        let rt2 = (3.0 * lead / (4.0 * k.powf(4.0 / 3.0)) * g.powi(6) + 4.0 * r2 * r2).sqrt();

        let d3 = d2 / 2.0;
        let n_of = |d: f64| {
            r2 * r2 + 2.0 * d * rt1 * rt1 / (d1 * d1) + 16.0 * k * k * rt1 * rt2.powi(3) * d
        };
        let n2 = n_of(d2);
        let n3 = n_of(d3);
        let rt3 = 4.0 * (n2 / d3).sqrt();
        let r3 = 12.0 * SQRT_2 / PI * (n3 / d3).sqrt();

        Ok(Self {
            c_l: cl,
            c_a: ca,
            nu,
            kappa0,
            grashof: g,
            grashof_alpha: Vec::new(),
            delta: [d1 / tau, d2 / tau, d3 / tau],
            strip_radius: [rt1, rt2, rt3],
            real_radius: [r1, r2, r3],
            n2,
            n3,
            standing_assumption: g >= single_point_threshold(),
        })
    }

    /// Seeds for a concrete force, recording `G_alpha` up to `alpha_max`.
    pub fn from_setup(setup: &PhysicalSetup, alpha_max: usize) -> Result<Self> {
        let mut c = Self::new(setup.nu(), setup.kappa0(), setup.grashof())?;
        c.grashof_alpha = (0..=alpha_max)
            .map(|a| setup.grashof_alpha(a as f64))
            .collect();
        Ok(c)
    }

    /// `nu kappa0^2`.
    pub fn rate(&self) -> f64 {
        self.nu * self.kappa0 * self.kappa0
    }

    /// Dimensionless strip width `nu kappa0^2 delta_alpha` for `alpha = 1, 2, 3`.
    pub fn scaled_delta(&self, alpha: usize) -> f64 {
        self.delta[alpha - 1] * self.rate()
    }

    /// `ln Gamma_alpha` for the fixed-strip recursion, `alpha >= 3`.
    pub fn ln_gamma(&self, alpha: usize) -> f64 {
        let [m1, m2, m3] = self.strip_radius;
        ln_gamma_with(alpha, m1, m2, m3, self.c_l, self.c_a)
    }

    /// Comparison bound `|Au|^2 <= nu^2 kappa0^4 G^2 (2 Lambda_1^{1/2} + c_L^2 G^2)` with
    /// `Lambda_1 = |A^{1/2} g|^2 / (kappa0^2 |g|^2)`, returned as the normalized radius
    /// next to `R_2`. Needs `G_1`.
    pub fn enstrophy_comparison(&self) -> Option<EnstrophyComparison> {
        let g1 = *self.grashof_alpha.get(1)?;
        let g = self.grashof;
        let lambda1 = (g1 / g).powi(2);
        let radius = (g * g * (2.0 * lambda1.sqrt() + self.c_l.powi(2) * g * g)).sqrt();
        Some(EnstrophyComparison {
            lambda1,
            comparison_radius: radius,
            strip_real_radius: self.real_radius[1],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnstrophyComparison {
    pub lambda1: f64,
    pub comparison_radius: f64,
    pub strip_real_radius: f64,
}

/// `ln Gamma_alpha` from three seed radii:
/// `3^3 2^{31/2} c_L^8 m1^2` at `alpha = 3`, otherwise
/// `2^{alpha+3/2} c_A (2^{alpha+2} c_A m1 m2 + (m1 m3)^{1/2})`.
pub fn ln_gamma_with(alpha: usize, m1: f64, m2: f64, m3: f64, cl: f64, ca: f64) -> f64 {
    assert!(alpha >= 3, "Gamma is defined from alpha = 3 on");
    let ln2 = 2f64.ln();
    if alpha == 3 {
        return 27f64.ln() + 15.5 * ln2 + 8.0 * cl.ln() + 2.0 * m1.ln();
    }
    let a = alpha as f64;
    let first = (a + 2.0) * ln2 + ca.ln() + m1.ln() + m2.ln();
    let second = 0.5 * (ln0(m1) + ln0(m3));
    (a + 1.5) * ln2 + ca.ln() + log_add(first, second)
}
