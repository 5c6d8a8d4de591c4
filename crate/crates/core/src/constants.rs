//! Absolute constants of the functional inequalities on the periodic square.

use std::f64::consts::PI;

/// Upper bound for the Ladyzhenskaya constant, `|u|_{L^4} <= c_L |u|^{1/2} |A^{1/2} u|^{1/2}`.
pub fn ladyzhenskaya() -> f64 {
    (1.0 / (2.0 * PI).powi(2) + 1.0 / (2f64.sqrt() * PI) + 2.0).powf(0.25)
}

/// Upper bound for the Agmon constant, `|u|_inf <= c_A |u|^{1/2} |A u|^{1/2}`.
pub fn agmon() -> f64 {
    (1.0 / (2.0 * PI).powi(2) + 1.0 / (2f64.sqrt() * PI) + 2.0 + 4.0 * 2f64.sqrt()).sqrt()
}

/// Grashof threshold below which the global attractor is a single point.
pub fn single_point_threshold() -> f64 {
    ladyzhenskaya().powi(-2)
}
