//! Function classes `C(sigma)` of fields whose Sobolev norms grow at most like
//! `exp(sigma alpha^2 / 2)`, with the Gevrey-log weight that lands in them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::logmath::{ln0, log_sum};
use crate::spectral::{NormProfile, SpectralField, C64};

/// Range of `alpha` in the supremum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    /// `alpha = 0, 1, 2, ...`
    Integer,
    /// `alpha >= 0` real.
    Continuous,
}

/// Whether norms enter as `|A^{alpha/2} u|` or as `|A^{alpha/2} u| / (nu kappa0^alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scaling {
    Raw,
    Normalized { nu: f64, kappa0: f64 },
}

impl Scaling {
    pub fn name(&self) -> &'static str {
        match self {
            Scaling::Raw => "raw",
            Scaling::Normalized { .. } => "normalized",
        }
    }

    /// `ln(nu kappa0^alpha)`, zero for raw scaling.
    fn ln_unit(&self, alpha: f64) -> f64 {
        match *self {
            Scaling::Raw => 0.0,
            Scaling::Normalized { nu, kappa0 } => nu.ln() + alpha * kappa0.ln(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Scaling::Normalized { nu, kappa0 } if !(nu > 0.0 && kappa0 > 0.0) => Err(
                Error::InvalidArgument("normalization needs positive nu and kappa0".into()),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaNormResult {
    pub sigma: f64,
    pub mode: NormMode,
    pub scaling: Scaling,
    /// `|u|_{C_sigma}`; may overflow to infinity when `log_value` does not.
    pub value: f64,
    pub log_value: f64,
    /// Where the supremum is attained.
    pub argmax_alpha: f64,
    /// Smallest `c0` with `|A^{alpha/2} u|^2 / (nu kappa0^alpha)^2 <= c0 e^{sigma alpha^2}`,
    /// available for normalized scaling.
    pub c0_hat: Option<f64>,
}

impl SigmaNormResult {
    fn new(
        sigma: f64,
        mode: NormMode,
        scaling: Scaling,
        log_value: f64,
        argmax_alpha: f64,
    ) -> Self {
        let c0_hat = match scaling {
            Scaling::Raw => None,
            Scaling::Normalized { .. } => Some((2.0 * log_value).exp()),
        };
        Self {
            sigma,
            mode,
            scaling,
            value: log_value.exp(),
            log_value,
            argmax_alpha,
            c0_hat,
        }
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )))
    }
}

/// `ln |A^{alpha/2} u|^2 = ln sum_s E_s Lambda_s^alpha` over the occupied shells.
struct ShellSpectrum {
    ln_energy: Vec<f64>,
    ln_lambda: Vec<f64>,
}

impl ShellSpectrum {
    fn of(u: &SpectralField) -> Self {
        let k2 = u.grid().kappa0().powi(2);
        let (ln_energy, ln_lambda) = u
            .shell_energies()
            .into_iter()
            .map(|(ksq, e)| (e.ln(), (k2 * ksq as f64).ln()))
            .unzip();
        Self {
            ln_energy,
            ln_lambda,
        }
    }

    fn ln_norm_sq(&self, alpha: f64) -> f64 {
        let terms: Vec<f64> = self
            .ln_energy
            .iter()
            .zip(&self.ln_lambda)
            .map(|(e, l)| e + alpha * l)
            .collect();
        log_sum(&terms)
    }

    /// Derivative of `ln_norm_sq` in `alpha`: the weighted mean of `ln Lambda`.
    fn mean_ln_lambda(&self, alpha: f64) -> f64 {
        let total = self.ln_norm_sq(alpha);
        self.ln_energy
            .iter()
            .zip(&self.ln_lambda)
            .map(|(e, l)| (e + alpha * l - total).exp() * l)
            .sum()
    }

    fn max_ln_lambda(&self) -> f64 {
        self.ln_lambda
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `|u|_{C_sigma}` of a truncated field, computed from its shell energies.
///
/// Beyond `alpha = ln Lambda_max / (2 sigma)` every term decreases, so both modes
/// search a bounded interval. The continuous maximum is located on a grid and
/// polished by bisection on the derivative.
pub fn c_sigma_norm(
    u: &SpectralField,
    sigma: f64,
    mode: NormMode,
    scaling: Scaling,
) -> Result<SigmaNormResult> {
    check_sigma(sigma)?;
    scaling.validate()?;
    let spec = ShellSpectrum::of(u);
    if spec.ln_energy.is_empty() {
        return Ok(SigmaNormResult::new(
            sigma,
            mode,
            scaling,
            f64::NEG_INFINITY,
            0.0,
        ));
    }
    let phi = |a: f64| 0.5 * spec.ln_norm_sq(a) - 0.5 * sigma * a * a - scaling.ln_unit(a);
    let dphi = |a: f64| {
        0.5 * spec.mean_ln_lambda(a) - sigma * a - scaling.ln_unit(1.0) + scaling.ln_unit(0.0)
    };
    let unit_slope = scaling.ln_unit(1.0) - scaling.ln_unit(0.0);
    let hi = ((0.5 * spec.max_ln_lambda() - unit_slope) / sigma).max(0.0);

    let (arg, val) = match mode {
        NormMode::Integer => (0..=hi.ceil() as usize + 1)
            .map(|a| (a as f64, phi(a as f64)))
            .fold((0.0, f64::NEG_INFINITY), |best, p| {
                if p.1 > best.1 {
                    p
                } else {
                    best
                }
            }),
        NormMode::Continuous => {
            let n = 4096;
            let grid: Vec<f64> = (0..=n).map(|i| hi * i as f64 / n as f64).collect();
            let mut best = (0.0, phi(0.0));
            for (i, &a) in grid.iter().enumerate() {
                let v = phi(a);
                if v > best.1 {
                    best = (i as f64, v);
                }
            }
            let i = best.0 as usize;
            let mut candidates = vec![(grid[i], best.1)];
            for (lo, up) in [(i.saturating_sub(1), i), (i, (i + 1).min(n))] {
                let (mut a, mut b) = (grid[lo], grid[up]);
                if a < b && dphi(a) > 0.0 && dphi(b) < 0.0 {
                    for _ in 0..200 {
                        let m = 0.5 * (a + b);
                        if m <= a || m >= b {
                            break;
                        }
                        if dphi(m) > 0.0 {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    let m = 0.5 * (a + b);
                    candidates.push((m, phi(m)));
                }
            }
            candidates
                .into_iter()
                .fold((0.0, f64::NEG_INFINITY), |best, p| {
                    if p.1 > best.1 {
                        p
                    } else {
                        best
                    }
                })
        }
    };
    Ok(SigmaNormResult::new(sigma, mode, scaling, val, arg))
}

/// `|u|_{C_sigma}` from sampled norms. Integer mode uses the sampled integer
/// exponents only; continuous mode maximizes over the log-linear interpolant
/// between consecutive samples, which bounds the true norms from above.
pub fn c_sigma_norm_profile(
    profile: &NormProfile,
    sigma: f64,
    mode: NormMode,
    scaling: Scaling,
) -> Result<SigmaNormResult> {
    check_sigma(sigma)?;
    scaling.validate()?;
    let pts = sorted_points(profile)?;
    let phi = |a: f64, lnv: f64| lnv - 0.5 * sigma * a * a - scaling.ln_unit(a);
    let mut best = (0.0, f64::NEG_INFINITY);
    let mut take = |a: f64, v: f64| {
        if v > best.1 {
            best = (a, v);
        }
    };
    match mode {
        NormMode::Integer => {
            for &(a, lnv) in pts.iter().filter(|(a, _)| a.fract() == 0.0) {
                take(a, phi(a, lnv));
            }
        }
        NormMode::Continuous => {
            for &(a, lnv) in &pts {
                take(a, phi(a, lnv));
            }
            for w in pts.windows(2) {
                let ((a0, l0), (a1, l1)) = (w[0], w[1]);
                if !(l0.is_finite() && l1.is_finite()) {
                    continue;
                }
                let slope = (l1 - l0) / (a1 - a0) - scaling.ln_unit(1.0) + scaling.ln_unit(0.0);
                let a = slope / sigma;
                if a > a0 && a < a1 {
                    take(a, phi(a, l0 + (l1 - l0) * (a - a0) / (a1 - a0)));
                }
            }
        }
    }
    Ok(SigmaNormResult::new(sigma, mode, scaling, best.1, best.0))
}

fn sorted_points(profile: &NormProfile) -> Result<Vec<(f64, f64)>> {
    if profile.alphas.len() != profile.values.len() {
        return Err(Error::InvalidArgument(
            "profile exponents and values differ in length".into(),
        ));
    }
    let mut pts = Vec::with_capacity(profile.alphas.len());
    for (&a, &v) in profile.alphas.iter().zip(&profile.values) {
        if !(a.is_finite() && a >= 0.0 && v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bad profile entry ({a}, {v})"
            )));
        }
        pts.push((a, ln0(v)));
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidArgument(
            "repeated exponent in profile".into(),
        ));
    }
    Ok(pts)
}

/// `|u|_{C_sigma1} / |u|_{C_sigma2} = exp((sigma2 - sigma1) (ln Lambda)^2 / (8 sigma1 sigma2))`
/// for a field on the single shell `Lambda`, continuous mode.
pub fn shell_ratio(lambda: f64, sigma1: f64, sigma2: f64) -> Result<f64> {
    Ok(shell_ratio_ln(lambda, sigma1, sigma2)?.exp())
}

pub fn shell_ratio_ln(lambda: f64, sigma1: f64, sigma2: f64) -> Result<f64> {
    check_sigma(sigma1)?;
    if !(sigma1 < sigma2 && sigma2.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need sigma1 < sigma2, got {sigma1} and {sigma2}"
        )));
    }
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "shell eigenvalue must exceed 1, got {lambda}"
        )));
    }
    let l = lambda.ln();
    Ok((sigma2 - sigma1) * l * l / (8.0 * sigma1 * sigma2))
}

/// Outcome of fitting `2 ln(|A^{alpha/2} u| / (nu kappa0^alpha)) = ln c0 + sigma alpha^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaFit {
    pub sigma_hat: f64,
    pub c0_hat: f64,
    /// Root-mean-square residual of the fit in the `2 ln` variable.
    pub residual: f64,
    /// Residual of the alternative fit linear in `alpha`.
    pub log_linear_residual: f64,
    /// The profile is explained by geometric growth in `alpha` (as for a single shell)
    /// far better than by the quadratic model; `sigma_hat` is then not meaningful.
    pub log_linear: bool,
    pub scaling: Scaling,
    pub points: usize,
}

/// Ordinary least squares of `2 ln(value / unit)` on `alpha^2`.
pub fn estimate_sigma(profile: &NormProfile, scaling: Scaling) -> Result<SigmaFit> {
    scaling.validate()?;
    let pts = sorted_points(profile)?;
    if pts.iter().all(|p| p.1 == f64::NEG_INFINITY) {
        return Err(Error::Degenerate("profile is identically zero".into()));
    }
    let data: Vec<(f64, f64)> = pts
        .iter()
        .filter(|p| p.1.is_finite())
        .map(|&(a, l)| (a, 2.0 * (l - scaling.ln_unit(a))))
        .collect();
    if data.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 positive profile values, got {}",
            data.len()
        )));
    }
    let quad: Vec<(f64, f64)> = data.iter().map(|&(a, y)| (a * a, y)).collect();
    let (slope, intercept, residual) = least_squares(&quad);
    let (_, _, lin_residual) = least_squares(&data);
    let scale = data.iter().map(|d| d.1.abs()).fold(1.0, f64::max);
    let log_linear = lin_residual <= 1e-3 * residual && residual > 1e-12 * scale;
    Ok(SigmaFit {
        sigma_hat: slope,
        c0_hat: intercept.exp(),
        residual,
        log_linear_residual: lin_residual,
        log_linear,
        scaling,
        points: data.len(),
    })
}

/// `(slope, intercept, rms residual)` of `y = intercept + slope x`.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

fn check_gevrey(a: f64, b: f64) -> Result<()> {
    if !(a > std::f64::consts::E && a.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Gevrey-log shift must exceed e, got {a}"
        )));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Gevrey-log exponent must be positive, got {b}"
        )));
    }
    Ok(())
}

/// Multiplies mode `k` by `exp(sign b (ln(|k| + a))^2)`, `sign = +1` or `-1`.
pub fn gevrey_log_apply(v: &SpectralField, a: f64, b: f64, sign: i8) -> Result<SpectralField> {
    check_gevrey(a, b)?;
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument(format!(
            "sign must be +1 or -1, got {sign}"
        )));
    }
    let grid = *v.grid();
    let coeffs = v
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, m)| {
            let k = (grid.k_sq(idx) as f64).sqrt();
            let w = C64::new((sign as f64 * b * (k + a).ln().powi(2)).exp(), 0.0);
            [m[0] * w, m[1] * w]
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs, v.symmetry())
}

/// Squared operator norm of `A^{alpha/2} e^{-b (ln(kappa0^{-1} A^{1/2} + a))^2}` at `kappa0 = 1`
/// over the truncation square, next to the bound `e^{alpha^2 / (2b)}`. Logarithms throughout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GevreyOpNorm {
    pub alpha: f64,
    pub ln_discrete_sup: f64,
    pub ln_bound: f64,
    /// `|k|^2` of the maximizing mode.
    pub argmax_k_sq: i64,
}

impl GevreyOpNorm {
    pub fn holds(&self) -> bool {
        self.ln_discrete_sup <= self.ln_bound
    }

    /// `ln(bound / sup)`.
    pub fn gap_ln(&self) -> f64 {
        self.ln_bound - self.ln_discrete_sup
    }
}

pub fn gevrey_log_opnorm(alpha: f64, a: f64, b: f64, k_max: usize) -> Result<GevreyOpNorm> {
    check_gevrey(a, b)?;
    if !(alpha >= 0.0 && alpha.is_finite()) || k_max == 0 {
        return Err(Error::InvalidArgument(
            "need alpha >= 0 and a positive truncation".into(),
        ));
    }
    let k = k_max as i64;
    let mut shells: Vec<i64> = (0..=k)
        .flat_map(|i| (i..=k).map(move |j| i * i + j * j))
        .filter(|&s| s > 0)
        .collect();
    shells.sort_unstable();
    shells.dedup();
    let (argmax_k_sq, ln_discrete_sup) = shells
        .into_iter()
        .map(|s| {
            let x = s as f64;
            (s, alpha * x.ln() - 2.0 * b * (x.sqrt() + a).ln().powi(2))
        })
        .fold(
            (0, f64::NEG_INFINITY),
            |best, p| if p.1 > best.1 { p } else { best },
        );
    Ok(GevreyOpNorm {
        alpha,
        ln_discrete_sup,
        ln_bound: alpha * alpha / (2.0 * b),
        argmax_k_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{GridSpec, Symmetry};

    fn single_shell(k: (i64, i64), amp: f64) -> SpectralField {
        let grid = GridSpec::standard(8).unwrap();
        let (k1, k2) = k;
        let m = [
            C64::new(-(k2 as f64) * amp, 0.0),
            C64::new(k1 as f64 * amp, 0.0),
        ];
        let conj = [m[0].conj(), m[1].conj()];
        SpectralField::from_modes(grid, &[((k1, k2), m), ((-k1, -k2), conj)], Symmetry::Real)
            .unwrap()
    }

    #[test]
    fn single_shell_closed_form() {
        let u = single_shell((3, 4), 0.1);
        let lam: f64 = 25.0;
        for sigma in [0.3, 1.0, 2.5] {
            let r = c_sigma_norm(&u, sigma, NormMode::Continuous, Scaling::Raw).unwrap();
            let expect = u.norm() * (lam.ln().powi(2) / (8.0 * sigma)).exp();
            assert!((r.value / expect - 1.0).abs() < 1e-13, "{sigma}");
            assert!((r.argmax_alpha - lam.ln() / (2.0 * sigma)).abs() < 1e-9);
            let i = c_sigma_norm(&u, sigma, NormMode::Integer, Scaling::Raw).unwrap();
            assert!(i.value <= r.value * (1.0 + 1e-14));
        }
    }

    #[test]
    fn integer_mode_attains_continuous_at_integer_argmax() {
        let u = single_shell((1, 0), 1.0);
        // Lambda = 1 puts the maximum at alpha = 0.
        let c = c_sigma_norm(&u, 1.0, NormMode::Continuous, Scaling::Raw).unwrap();
        let i = c_sigma_norm(&u, 1.0, NormMode::Integer, Scaling::Raw).unwrap();
        assert!((c.value - i.value).abs() <= 1e-14 * c.value);
        let v = single_shell((3, 4), 1.0);
        let sigma = 25f64.ln() / 4.0;
        let c = c_sigma_norm(&v, sigma, NormMode::Continuous, Scaling::Raw).unwrap();
        let i = c_sigma_norm(&v, sigma, NormMode::Integer, Scaling::Raw).unwrap();
        assert!((c.value / i.value - 1.0).abs() < 1e-13);
        assert_eq!(i.argmax_alpha, 2.0);
    }

    #[test]
    fn worked_shell_ratio() {
        let r = shell_ratio(8f64.exp(), 1.0, 2.0).unwrap();
        assert!((r - 4f64.exp()).abs() < 1e-12 * r);
        assert!(shell_ratio(10.0, 2.0, 1.0).is_err());
        assert!(shell_ratio(10.0, 1.0, 1.0).is_err());
        assert!((shell_ratio(10.0, 1.0, 1.0 + 1e-12).unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn exact_model_profile_is_recovered() {
        let (sigma, c0, nu, k0): (f64, f64, f64, f64) = (0.7, 3.5, 2.0, 0.5);
        let alphas: Vec<f64> = (0..10).map(|a| a as f64).collect();
        let values = alphas
            .iter()
            .map(|&a| c0.sqrt() * (0.5 * sigma * a * a).exp() * nu * k0.powf(a))
            .collect();
        let fit = estimate_sigma(
            &NormProfile { alphas, values },
            Scaling::Normalized { nu, kappa0: k0 },
        )
        .unwrap();
        assert!((fit.sigma_hat - sigma).abs() < 1e-12);
        assert!((fit.c0_hat / c0 - 1.0).abs() < 1e-12);
        assert!(!fit.log_linear);
    }

    #[test]
    fn single_shell_profile_is_flagged() {
        let u = single_shell((2, 1), 1.0);
        let alphas: Vec<f64> = (1..=8).map(|a| a as f64).collect();
        let fit = estimate_sigma(
            &u.norm_profile(&alphas),
            Scaling::Normalized {
                nu: 1.0,
                kappa0: 1.0,
            },
        )
        .unwrap();
        assert!(fit.log_linear);
    }

    #[test]
    fn zero_profile_is_degenerate() {
        let p = NormProfile {
            alphas: vec![0.0, 1.0, 2.0, 3.0],
            values: vec![0.0; 4],
        };
        assert!(matches!(
            estimate_sigma(&p, Scaling::Raw),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn gevrey_weight_roundtrip_and_value() {
        let u = single_shell((3, 4), 1.0);
        let w = gevrey_log_apply(&u, 3.0, 1.0, 1).unwrap();
        let factor = w.coeff(3, 4).unwrap()[0].re / u.coeff(3, 4).unwrap()[0].re;
        assert!((factor / 8f64.ln().powi(2).exp() - 1.0).abs() < 1e-14);
        let back = gevrey_log_apply(&w, 3.0, 1.0, -1).unwrap();
        let d = back.axpy(C64::new(-1.0, 0.0), &u).unwrap();
        assert!(d.norm() <= 1e-13 * u.norm());
        assert!(gevrey_log_apply(&u, 2.7, 1.0, 1).is_err());
        assert!(gevrey_log_apply(&u, 3.0, 1.0, 2).is_err());
    }

    #[test]
    fn gevrey_operator_bound() {
        let r = gevrey_log_opnorm(0.0, 3.0, 1.0, 64).unwrap();
        assert!(r.ln_discrete_sup <= 0.0 && r.holds());
        let r = gevrey_log_opnorm(10.0, 3.0, 1.0, 64).unwrap();
        assert!(r.holds() && r.gap_ln() > 0.0);
    }
}
