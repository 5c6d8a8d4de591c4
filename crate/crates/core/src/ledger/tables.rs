//! Bound tables `alpha -> (delta_alpha, R~_alpha)` kept in the log domain.
//!
//! `Gamma_alpha` grows like `4^alpha` and enters through `beta^{Gamma}`, so the
//! radii leave double range within a handful of rows; every radius is stored as
//! `ln R~_alpha^2`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::base::LedgerConstants;
use super::logmath::{ln0, log_add, log_sum};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableMode {
    /// Needs `0` on the attractor; fixed strip width `delta_3` from `alpha = 3` on.
    ConditionalFixedStrip,
    /// Needs `0` on the attractor; the strip width halves at every order.
    ConditionalShrinking,
    /// Driven by the regularity of `g` alone.
    Unconditional,
}

impl TableMode {
    pub fn name(&self) -> &'static str {
        match self {
            TableMode::ConditionalFixedStrip => "conditional_fixed_strip",
            TableMode::ConditionalShrinking => "conditional_shrinking",
            TableMode::Unconditional => "unconditional",
        }
    }
}

/// Which printed form of the fixed-strip recursion to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StripVariant {
    /// Prefactor `72 sqrt2 / pi^2`, last correction term `pi^2 / (72 (nu kappa0^2 delta)^2 Gamma_alpha Gamma_{alpha+1})`.
    Derived,
    /// Prefactor `36 sqrt2 / pi^2`, last correction term with `delta^4`.
    Printed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LedgerOptions {
    pub alpha_max: usize,
    pub variant: StripVariant,
    /// Include `2` in the maximum defining `beta_2`.
    pub beta2_includes_two: bool,
    /// Hard cap on the number of factors of an infinite product.
    pub product_cap: usize,
    /// Number of factors kept in the (divergent) shrinking-strip product.
    pub shrinking_depth: usize,
}

impl Default for LedgerOptions {
    fn default() -> Self {
        Self {
            alpha_max: 30,
            variant: StripVariant::Derived,
            beta2_includes_two: true,
            product_cap: 200,
            shrinking_depth: 50,
        }
    }
}

/// One row of a bound table. Radii are normalized: the bound on `|A^{alpha/2} u|`
/// is `R~_alpha nu kappa0^alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub alpha: usize,
    /// Strip half-width (physical time).
    pub delta: f64,
    /// `ln R~_alpha^2`.
    pub rt_sq_ln: f64,
    /// `ln R_alpha^2`, the real-axis radius, where defined.
    pub r_sq_ln: Option<f64>,
    pub gamma_ln: Option<f64>,
    /// `ln` of the closed-form envelope on `R~_alpha^2`, where defined.
    pub envelope_ln: Option<f64>,
    /// Correction factor `epsilon_{alpha-1}` or `xi_{alpha-1}` used to reach this row.
    pub correction: Option<f64>,
    /// `ln` of the implied bound `G_alpha <= R~_alpha / (nu kappa0^2 delta_alpha)`.
    pub g_bound_ln: Option<f64>,
    /// `ln(R~_alpha^2 / R~_{alpha-1}^2)` as computed by the recursion. Once the
    /// absolute logarithms exceed about `1e16`, row-to-row comparisons must use these.
    pub step_ln: Option<f64>,
    /// `ln(R_alpha^2 / R~_{alpha-1}^2)`.
    pub real_step_ln: Option<f64>,
}

/// Partial evaluation of `prod_{gamma >= start} (1 + t_gamma)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedProduct {
    pub name: String,
    pub value_ln: f64,
    /// Index of the last factor included.
    pub last_index: usize,
    /// True when the factors fell below double resolution before the cap.
    pub converged: bool,
}

impl TruncatedProduct {
    fn evaluate(name: &str, start: usize, cap: usize, term: impl Fn(usize) -> f64) -> Self {
        let mut value_ln = 0.0;
        let mut last = start;
        let mut converged = false;
        for g in start..start + cap {
            let t = term(g);
            value_ln += t.ln_1p();
            last = g;
            if t < 1e-16 {
                converged = true;
                break;
            }
        }
        Self {
            name: name.into(),
            value_ln,
            last_index: last,
            converged,
        }
    }

    fn fixed_depth(name: &str, start: usize, end: usize, term: impl Fn(usize) -> f64) -> Self {
        let value_ln = (start..=end).map(|g| term(g).ln_1p()).sum();
        Self {
            name: name.into(),
            value_ln,
            last_index: end,
            converged: false,
        }
    }
}

/// Parameters of the closed-form envelope `ln R~^2 <= ln C + a(alpha) ln b1 + p(alpha) ln b2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeParams {
    pub constant_ln: f64,
    /// `ln beta_1` (fixed strip) or `0` (shrinking).
    pub beta1_ln: f64,
    /// `ln beta_2` (fixed strip) or `ln beta_3` (shrinking).
    pub beta2_ln: f64,
    pub first_alpha: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTable {
    pub mode: TableMode,
    pub variant: StripVariant,
    pub nu: f64,
    pub kappa0: f64,
    pub grashof: f64,
    pub rows: Vec<BoundRow>,
    pub products: Vec<TruncatedProduct>,
    pub envelope: Option<EnvelopeParams>,
    pub warnings: Vec<String>,
}

impl BoundTable {
    pub fn row(&self, alpha: usize) -> Option<&BoundRow> {
        self.rows.iter().find(|r| r.alpha == alpha)
    }

    /// Bound on `|A^{alpha/2} u(zeta)|` in the strip, possibly infinite in double precision.
    pub fn strip_bound(&self, alpha: usize) -> Option<f64> {
        self.row(alpha)
            .map(|r| (0.5 * r.rt_sq_ln).exp() * self.nu * self.kappa0.powi(alpha as i32))
    }

    /// Bound on `|A^{alpha/2} u(t)|` for real `t`.
    pub fn real_bound(&self, alpha: usize) -> Option<f64> {
        let r = self.row(alpha)?;
        r.r_sq_ln
            .map(|l| (0.5 * l).exp() * self.nu * self.kappa0.powi(alpha as i32))
    }

    pub fn product(&self, name: &str) -> Option<&TruncatedProduct> {
        self.products.iter().find(|p| p.name == name)
    }

    /// `alpha, delta_alpha, ln_rt_sq, ln_r_sq, ln_gamma, envelope_ln, mode` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "alpha",
            "delta_alpha",
            "ln_rt_sq",
            "ln_r_sq",
            "ln_gamma",
            "envelope_ln",
            "mode",
        ])?;
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.alpha.to_string(),
                format!("{:e}", r.delta),
                format!("{:e}", r.rt_sq_ln),
                opt(r.r_sq_ln),
                opt(r.gamma_ln),
                opt(r.envelope_ln),
                self.mode.name().to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }
}

fn seed_rows(c: &LedgerConstants) -> Vec<BoundRow> {
    (1..=3)
        .map(|a| {
            let rt = c.strip_radius[a - 1];
            let sd = c.scaled_delta(a);
            BoundRow {
                alpha: a,
                delta: c.delta[a - 1],
                rt_sq_ln: 2.0 * rt.ln(),
                r_sq_ln: Some(2.0 * c.real_radius[a - 1].ln()),
                gamma_ln: (a == 3).then(|| c.ln_gamma(3)),
                envelope_ln: None,
                correction: None,
                g_bound_ln: Some(rt.ln() - sd.ln()),
                step_ln: None,
                real_step_ln: None,
            }
        })
        .collect()
}

fn check_alpha_max(alpha_max: usize) -> Result<()> {
    if alpha_max < 3 {
        return Err(Error::InvalidArgument(
            "tables start at alpha = 3; alpha_max must be >= 3".into(),
        ));
    }
    Ok(())
}

/// Fixed-strip correction `epsilon_alpha` at dimensionless width `d = nu kappa0^2 delta`.
pub fn epsilon(variant: StripVariant, d: f64, gamma_ln: f64, gamma_next_ln: f64) -> f64 {
    let inv_g = (-gamma_ln).exp();
    let inv_gg = (-gamma_ln - gamma_next_ln).exp();
    let last = match variant {
        StripVariant::Derived => PI * PI / (72.0 * d * d) * inv_gg,
        StripVariant::Printed => PI * PI / (72.0 * d.powi(4)) * inv_gg,
    };
    inv_g / (2.0 * SQRT_2 * d) + SQRT_2 * inv_g / (d * d) + last
}

/// Ledger on a strip of fixed width `delta_3`, requiring `0` on the attractor.
///
/// From `alpha = 3`:
/// `R_{alpha+1}^2 = 36/pi^2 (1/d + 4/d^2 + 2 sqrt2 Gamma_alpha) R~_alpha^2` and
/// `R~_{alpha+1}^2 = beta^{Gamma_{alpha+1}} c Gamma_alpha (1 + epsilon_alpha) R~_alpha^2`,
/// with `d = nu kappa0^2 delta_3` and `beta = exp(2 sqrt2 d)`.
pub fn conditional_fixed_strip(c: &LedgerConstants, opts: &LedgerOptions) -> Result<BoundTable> {
    check_alpha_max(opts.alpha_max)?;
    let d = c.scaled_delta(3);
    let delta = c.delta[2];
    let prefactor = match opts.variant {
        StripVariant::Derived => 72.0 * SQRT_2 / (PI * PI),
        StripVariant::Printed => 36.0 * SQRT_2 / (PI * PI),
    };
    let mut rows = seed_rows(c);
    for alpha in 3..opts.alpha_max {
        let prev = rows.last().expect("seeded").clone();
        let g = c.ln_gamma(alpha);
        let g_next = c.ln_gamma(alpha + 1);
        let eps = epsilon(opts.variant, d, g, g_next);
        let real_step = (36.0 / (PI * PI)).ln()
            + log_sum(&[-d.ln(), 4f64.ln() - 2.0 * d.ln(), (2.0 * SQRT_2).ln() + g]);
        let step = 2.0 * SQRT_2 * d * g_next.exp() + prefactor.ln() + g + eps.ln_1p();
        let r_sq_ln = real_step + prev.rt_sq_ln;
        let rt_sq_ln = step + prev.rt_sq_ln;
        rows.push(BoundRow {
            alpha: alpha + 1,
            delta,
            rt_sq_ln,
            r_sq_ln: Some(r_sq_ln),
            gamma_ln: Some(g_next),
            envelope_ln: None,
            correction: Some(eps),
            g_bound_ln: Some(0.5 * rt_sq_ln - d.ln()),
            step_ln: Some(step),
            real_step_ln: Some(real_step),
        });
    }

    let [rt1, rt2, rt3] = c.strip_radius;
    let ca = c.c_a;
    let c1 = TruncatedProduct::evaluate("fixed_strip_epsilon", 3, opts.product_cap, |a| {
        epsilon(opts.variant, d, c.ln_gamma(a), c.ln_gamma(a + 1))
    });
    let c2_factors = TruncatedProduct::evaluate("gamma_ratio_eta", 3, opts.product_cap, |g| {
        (rt1 * rt3).sqrt() / (2f64.powi(g as i32 + 2) * ca * rt1 * rt2)
    });
    let ln2 = 2f64.ln();
    let c2_ln = 27f64.ln() - 7.0 * ln2 + 8.0 * c.c_l.ln() + 2.0 * rt1.ln() + c2_factors.value_ln;
    let c3 = 4.0 * (2f64.powf(2.5) * ca * ca * rt1 * rt2 + SQRT_2 * ca * (rt1 * rt3).sqrt());
    let beta1_ln = c3 * 2.0 * SQRT_2 * d;
    let mut b2 = (72.0 * SQRT_2 / (PI * PI)).max(ca * ca * rt1 * rt2);
    if opts.beta2_includes_two {
        b2 = b2.max(2.0);
    }
    let beta2_ln = b2.ln();
    let constant_ln = c1.value_ln + c2_ln + 2.0 * rt3.ln() - 9.5 * beta2_ln;
    let first_alpha = 4;
    for r in rows.iter_mut().filter(|r| r.alpha >= first_alpha) {
        let a = r.alpha as f64;
        r.envelope_ln = Some(constant_ln + 4f64.powf(a) * beta1_ln + (a * a + 4.5 * a) * beta2_ln);
    }

    Ok(BoundTable {
        mode: TableMode::ConditionalFixedStrip,
        variant: opts.variant,
        nu: c.nu,
        kappa0: c.kappa0,
        grashof: c.grashof,
        rows,
        products: vec![c1, c2_factors],
        envelope: Some(EnvelopeParams {
            constant_ln,
            beta1_ln,
            beta2_ln,
            first_alpha,
        }),
        warnings: regime_warnings(c),
    })
}

/// Shrinking-strip correction `xi_alpha` for widths `d_alpha`, `d_{alpha+1} = d_alpha / 2`.
pub fn xi(d_alpha: f64, gamma_ln: f64) -> f64 {
    let d_next = d_alpha / 2.0;
    let inv_g = (-gamma_ln).exp();
    inv_g / (4.0 * SQRT_2 * d_next) + inv_g / (SQRT_2 * d_alpha * d_next)
}

/// Ledger with halving strip widths:
/// `R~_{alpha+1}^2 = 1024 sqrt2 / pi^2 Gamma_alpha (1 + xi_alpha) R~_alpha^2`.
///
/// `xi_alpha` tends to a positive constant, so the product in the envelope
/// constant is cut at `opts.shrinking_depth` factors and flagged as not converged.
pub fn conditional_shrinking(c: &LedgerConstants, opts: &LedgerOptions) -> Result<BoundTable> {
    check_alpha_max(opts.alpha_max)?;
    let d3 = c.scaled_delta(3);
    let scaled = |a: usize| d3 * 0.5f64.powi(a as i32 - 3);
    let prefactor_ln = (1024.0 * SQRT_2 / (PI * PI)).ln();
    let mut rows = seed_rows(c);
    for alpha in 3..opts.alpha_max {
        let prev = rows.last().expect("seeded").clone();
        let g = c.ln_gamma(alpha);
        let x = xi(scaled(alpha), g);
        let step = prefactor_ln + g + x.ln_1p();
        let rt_sq_ln = step + prev.rt_sq_ln;
        let d_next = scaled(alpha + 1);
        rows.push(BoundRow {
            alpha: alpha + 1,
            delta: d_next / c.rate(),
            rt_sq_ln,
            r_sq_ln: None,
            gamma_ln: Some(c.ln_gamma(alpha + 1)),
            envelope_ln: None,
            correction: Some(x),
            g_bound_ln: Some(0.5 * rt_sq_ln - d_next.ln()),
            step_ln: Some(step),
            real_step_ln: None,
        });
    }

    let [rt1, rt2, rt3] = c.strip_radius;
    let ca = c.c_a;
    let c2_factors = TruncatedProduct::evaluate("gamma_ratio_eta", 3, opts.product_cap, |g| {
        (rt1 * rt3).sqrt() / (2f64.powi(g as i32 + 2) * ca * rt1 * rt2)
    });
    let c2_ln =
        27f64.ln() - 7.0 * 2f64.ln() + 8.0 * c.c_l.ln() + 2.0 * rt1.ln() + c2_factors.value_ln;
    let c4 = TruncatedProduct::fixed_depth("shrinking_xi", 3, opts.shrinking_depth, |a| {
        xi(scaled(a), c.ln_gamma(a))
    });
    let beta3_ln = (1024.0 * SQRT_2 / (PI * PI)).max(ca * ca * rt1 * rt2).ln();
    let constant_ln = c2_ln + c4.value_ln + 2.0 * rt3.ln() - 0.375 * beta3_ln;
    let first_alpha = 4;
    for r in rows.iter_mut().filter(|r| r.alpha >= first_alpha) {
        let a = r.alpha as f64;
        r.envelope_ln = Some(constant_ln + 1.5 * a * a * beta3_ln);
    }
    let mut warnings = regime_warnings(c);
    warnings.push(format!(
        "shrinking-strip product does not converge; envelope constant truncated after alpha = {}",
        opts.shrinking_depth
    ));
    Ok(BoundTable {
        mode: TableMode::ConditionalShrinking,
        variant: opts.variant,
        nu: c.nu,
        kappa0: c.kappa0,
        grashof: c.grashof,
        rows,
        products: vec![c2_factors, c4],
        envelope: Some(EnvelopeParams {
            constant_ln,
            beta1_ln: 0.0,
            beta2_ln: beta3_ln,
            first_alpha,
        }),
        warnings,
    })
}

fn regime_warnings(c: &LedgerConstants) -> Vec<String> {
    if c.standing_assumption {
        Vec::new()
    } else {
        vec![format!(
            "G = {} is below c_L^-2 = {}: the attractor is a single point and the radius constants are outside their derivation regime",
            c.grashof,
            1.0 / (c.c_l * c.c_l)
        )]
    }
}

/// Log-domain versions of the sector radii for data of normalized size `x`
/// (`ln x` is passed) at Grashof number `G`.
pub struct SectorRadii<'a> {
    c: &'a LedgerConstants,
}

impl<'a> SectorRadii<'a> {
    pub fn new(c: &'a LedgerConstants) -> Self {
        Self { c }
    }

    fn base_ln(&self) -> f64 {
        (2f64.powf(1.0 / 3.0) / 24.0 * self.c.grashof.powi(2)).ln()
    }

    /// `ln rho_max(G, x)`, the sector radius (physical time).
    pub fn rho_max_ln(&self, x_ln: f64) -> f64 {
        let c = self.c;
        0.5 * 2f64.ln()
            - (4.0 * 24f64.powi(3) * c.c_l.powi(8) * c.rate()).ln()
            - 2.0 * log_add(self.base_ln(), 2.0 * x_ln)
    }

    /// `ln M_1(G, x)`: first-order bound in the sector.
    pub fn m1_ln(&self, x_ln: f64) -> f64 {
        0.5 * log_add(self.base_ln(), 0.5 * 2f64.ln() + 2.0 * x_ln)
    }

    /// `ln M_2(G, G_1, x)`.
    pub fn m2_ln(&self, g1: f64, x_ln: f64) -> f64 {
        let c = self.c;
        let cl8 = c.c_l.powi(8);
        let m1 = self.m1_ln(x_ln);
        let growth =
            (27.0 * 2f64.powf(11.5) * cl8).ln() + c.rate().ln() + 4.0 * m1 + self.rho_max_ln(x_ln);
        growth.exp()
            + 0.5
                * log_add(
                    2.0 * x_ln,
                    2.0 * ln0(g1) - (27.0 * 1024.0 * cl8).ln() - 4.0 * m1,
                )
    }

    /// `ln M_3(G, G_2, x)`.
    pub fn m3_ln(&self, g2: f64, x_ln: f64) -> f64 {
        let c = self.c;
        let cl8 = c.c_l.powi(8);
        let m1 = self.m1_ln(x_ln);
        let growth =
            (27.0 * 2f64.powf(15.5) * cl8).ln() + c.rate().ln() + 4.0 * m1 + self.rho_max_ln(x_ln);
        growth.exp()
            + 0.5
                * log_add(
                    2.0 * x_ln,
                    2.0 * ln0(g2) - (27.0 * 2f64.powi(15) * cl8).ln() - 4.0 * m1,
                )
    }

    /// `ln M_alpha(G, G_{alpha-1}, x)` for `alpha >= 4`, given `G_1` and `G_2`.
    pub fn m_high_ln(&self, alpha: usize, g1: f64, g2: f64, g_prev: f64, x_ln: f64) -> f64 {
        let c = self.c;
        let a = alpha as f64;
        let ln2 = 2f64.ln();
        let (m1, m2, m3) = (self.m1_ln(x_ln), self.m2_ln(g1, x_ln), self.m3_ln(g2, x_ln));
        let gamma_ln = log_add(
            (2.0 * a + 3.5) * ln2 + 2.0 * c.c_a.ln() + m1 + m2,
            (a + 1.5) * ln2 + c.c_a.ln() + 0.5 * (m1 + m3),
        );
        let growth = (gamma_ln + c.rate().ln() + self.rho_max_ln(x_ln)).exp();
        growth + 0.5 * log_add(2.0 * x_ln, 0.5 * ln2 + 2.0 * ln0(g_prev) - gamma_ln)
    }

    /// Dispatches on `alpha` (2, 3 or higher) with `grashof_alpha = [G_0, G_1, ...]`.
    pub fn m_ln(&self, alpha: usize, grashof_alpha: &[f64], x_ln: f64) -> f64 {
        match alpha {
            0 | 1 => self.m1_ln(x_ln),
            2 => self.m2_ln(grashof_alpha[1], x_ln),
            3 => self.m3_ln(grashof_alpha[2], x_ln),
            a => self.m_high_ln(
                a,
                grashof_alpha[1],
                grashof_alpha[2],
                grashof_alpha[a - 1],
                x_ln,
            ),
        }
    }
}

/// Ledger driven by `G_alpha` alone:
/// `m_1 = sqrt2 G`, `m_{alpha+1} = M_{alpha+1}(G, G_alpha, m_alpha)`,
/// `delta_{alpha+1} = rho_max(G, m_alpha) / sqrt2`.
///
/// The third argument of `M_{alpha+1}` is read as the normalized size of the
/// data in the norm being propagated, here `m_alpha`.
pub fn unconditional(c: &LedgerConstants, opts: &LedgerOptions) -> Result<BoundTable> {
    check_alpha_max(opts.alpha_max)?;
    if c.grashof_alpha.len() < opts.alpha_max {
        return Err(Error::InvalidArgument(format!(
            "unconditional ledger needs G_alpha up to alpha = {}, have {}",
            opts.alpha_max - 1,
            c.grashof_alpha.len().saturating_sub(1)
        )));
    }
    let radii = SectorRadii::new(c);
    let rt1 = c.strip_radius[0];
    let mut rows = vec![BoundRow {
        alpha: 1,
        delta: c.delta[0],
        rt_sq_ln: 2.0 * rt1.ln(),
        r_sq_ln: Some(2.0 * c.real_radius[0].ln()),
        gamma_ln: None,
        envelope_ln: None,
        correction: None,
        g_bound_ln: None,
        step_ln: None,
        real_step_ln: None,
    }];
    for alpha in 1..opts.alpha_max {
        let m_ln = 0.5 * rows.last().expect("seeded").rt_sq_ln;
        let next = radii.m_ln(alpha + 1, &c.grashof_alpha, m_ln);
        let step = 2.0 * (next - m_ln);
        rows.push(BoundRow {
            alpha: alpha + 1,
            delta: radii.rho_max_ln(m_ln).exp() / SQRT_2,
            rt_sq_ln: 2.0 * next,
            r_sq_ln: None,
            gamma_ln: None,
            envelope_ln: None,
            correction: None,
            g_bound_ln: None,
            step_ln: Some(step),
            real_step_ln: None,
        });
    }
    let mut warnings = regime_warnings(c);
    warnings.push("third argument of M_alpha taken as the previous order's bound m_alpha".into());
    Ok(BoundTable {
        mode: TableMode::Unconditional,
        variant: opts.variant,
        nu: c.nu,
        kappa0: c.kappa0,
        grashof: c.grashof,
        rows,
        products: Vec::new(),
        envelope: None,
        warnings,
    })
}

/// First `alpha` at which the fixed-strip radius exceeds the shrinking-strip one.
pub fn crossover(fixed: &BoundTable, shrinking: &BoundTable) -> Option<usize> {
    fixed
        .rows
        .iter()
        .zip(&shrinking.rows)
        .find(|(f, s)| f.alpha >= 4 && f.rt_sq_ln > s.rt_sq_ln)
        .map(|(f, _)| f.alpha)
}
