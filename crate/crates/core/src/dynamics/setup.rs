use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::single_point_threshold;
use crate::error::{Error, Result};
use crate::spectral::{GridSpec, SpectralField, Symmetry, C64};

/// Viscosity, forcing and grid of one experiment.
#[derive(Clone, Debug)]
pub struct PhysicalSetup {
    grid: GridSpec,
    nu: f64,
    force: SpectralField,
}

impl PhysicalSetup {
    pub fn new(nu: f64, force: SpectralField) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "viscosity must be positive, got {nu}"
            )));
        }
        if force.symmetry() != Symmetry::Real {
            return Err(Error::InvalidArgument(
                "the body force must be a real field".into(),
            ));
        }
        Ok(Self {
            grid: *force.grid(),
            nu,
            force,
        })
    }

    /// Shear force `gamma (sin(kappa0 k_f x2), 0)` scaled to the requested Grashof number.
    pub fn kolmogorov(grid: GridSpec, nu: f64, k_f: i64, grashof: f64) -> Result<Self> {
        if k_f < 1 || grid.index(0, k_f).is_none() {
            return Err(Error::InvalidArgument(format!(
                "forcing wavenumber {k_f} not resolved"
            )));
        }
        let unit = SpectralField::from_modes(
            grid,
            &[((0, k_f), [C64::new(0.0, -0.5), C64::new(0.0, 0.0)])],
            Symmetry::Real,
        )?;
        Self::with_grashof(nu, unit, grashof)
    }

    /// Rescales the shape of `force` so that `|g| / (nu^2 kappa0^2) = grashof`.
    pub fn with_grashof(nu: f64, shape: SpectralField, grashof: f64) -> Result<Self> {
        if !(grashof.is_finite() && grashof >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Grashof number must be nonnegative, got {grashof}"
            )));
        }
        let n = shape.norm();
        if n == 0.0 && grashof > 0.0 {
            return Err(Error::Degenerate("force shape is zero".into()));
        }
        let target = grashof * nu * nu * shape.grid().kappa0().powi(2);
        let s = if n == 0.0 { 0.0 } else { target / n };
        Self::new(nu, shape.scaled(C64::new(s, 0.0)))
    }

    pub fn unforced(grid: GridSpec, nu: f64) -> Result<Self> {
        Self::new(nu, SpectralField::zeros(grid, Symmetry::Real))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn kappa0(&self) -> f64 {
        self.grid.kappa0()
    }

    pub fn force(&self) -> &SpectralField {
        &self.force
    }

    /// `nu kappa0^2`, the slowest viscous decay rate.
    pub fn rate(&self) -> f64 {
        self.nu * self.kappa0().powi(2)
    }

    /// `G = |g| / (nu^2 kappa0^2)`.
    pub fn grashof(&self) -> f64 {
        self.force.norm() / (self.nu * self.nu * self.kappa0().powi(2))
    }

    /// `G_alpha = |A^{alpha/2} g| / (nu^2 kappa0^{alpha+2})`.
    pub fn grashof_alpha(&self, alpha: f64) -> f64 {
        self.force.sobolev_norm(alpha) / (self.nu * self.nu * self.kappa0().powf(alpha + 2.0))
    }

    /// Below `c_L^{-2}` the attractor is a single stationary point.
    pub fn single_point_regime(&self) -> bool {
        self.grashof() < single_point_threshold()
    }

    pub fn summary(&self) -> SetupSummary {
        let mut h = Sha256::new();
        for m in self.force.coeffs() {
            for x in [m[0].re, m[0].im, m[1].re, m[1].im] {
                h.update(x.to_le_bytes());
            }
        }
        SetupSummary {
            length: self.grid.length(),
            kappa0: self.kappa0(),
            k_max: self.grid.k_max(),
            padded: self.grid.padded(),
            nu: self.nu,
            grashof: self.grashof(),
            force_sha256: format!("{:x}", h.finalize()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetupSummary {
    #[serde(rename = "L")]
    pub length: f64,
    pub kappa0: f64,
    #[serde(rename = "K")]
    pub k_max: usize,
    #[serde(rename = "M")]
    pub padded: usize,
    pub nu: f64,
    pub grashof: f64,
    pub force_sha256: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_hits_requested_grashof() {
        let g = GridSpec::standard(8).unwrap();
        let s = PhysicalSetup::kolmogorov(g, 0.7, 2, 3.0).unwrap();
        assert!((s.grashof() - 3.0).abs() < 1e-13);
        assert!(!s.single_point_regime());
        let weak = PhysicalSetup::kolmogorov(g, 1.0, 1, 0.5).unwrap();
        assert!(weak.single_point_regime());
        // single mode on |k|^2 = 4: G_alpha = G * 4^{alpha/2}.
        assert!((s.grashof_alpha(3.0) - 3.0 * 8.0).abs() < 1e-12);
        assert!(PhysicalSetup::kolmogorov(g, 1.0, 9, 1.0).is_err());
    }
}
