/// `ln(e^a + e^b)`, exact for infinite arguments.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum e^{x_i})`.
pub fn log_sum(xs: &[f64]) -> f64 {
    xs.iter().fold(f64::NEG_INFINITY, |acc, &x| log_add(acc, x))
}

/// `ln x`, with `ln 0 = -inf`.
pub fn ln0(x: f64) -> f64 {
    if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_add_matches_direct() {
        for (a, b) in [(1.0f64, 2.0f64), (-3.0, 5.0), (700.0, 700.0), (0.0, -40.0)] {
            let direct = (a.exp() + b.exp()).ln();
            assert!((log_add(a, b) - direct).abs() <= 1e-14 * direct.abs().max(1.0));
        }
        assert_eq!(log_add(f64::NEG_INFINITY, 3.0), 3.0);
        assert!((log_add(1e4, 1e4) - (1e4 + 2f64.ln())).abs() < 1e-10);
        assert!((log_sum(&[0.0, 0.0, 0.0]) - 3f64.ln()).abs() < 1e-15);
    }
}
