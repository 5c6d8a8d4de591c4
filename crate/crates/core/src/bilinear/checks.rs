//! Residuals of the algebraic identities of `B` and ratios `lhs / rhs` of the
//! transfer inequalities, sampled over random fields.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BilinearWorkspace;
use crate::constants::{agmon, ladyzhenskaya};
use crate::error::{Error, Result};
use crate::spectral::{
    inner_raw, lebesgue_norms, random_field, FieldFamily, GridSpec, SpectralField, Symmetry, C64,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    /// `(B(u,v), w) = -(B(u,w), v)`, read through the bilinear pairing.
    Skew,
    /// `(B(u,u), Au) = 0`.
    EnstrophyOrthogonality,
    /// `(B(Av,v), u) = (B(u,v), Av)`.
    Transfer,
    /// `(B(u,v), Av) + (B(v,u), Av) + (B(v,v), Au) = 0`.
    CyclicSum,
    /// `A B(u,u) = B(u, Au) - B(Au, u)`.
    StokesCommutator,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 5] = [
        IdentityKind::Skew,
        IdentityKind::EnstrophyOrthogonality,
        IdentityKind::Transfer,
        IdentityKind::CyclicSum,
        IdentityKind::StokesCommutator,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityKind::Skew => "skew",
            IdentityKind::EnstrophyOrthogonality => "enstrophy_orthogonality",
            IdentityKind::Transfer => "transfer",
            IdentityKind::CyclicSum => "cyclic_sum",
            IdentityKind::StokesCommutator => "stokes_commutator",
        }
    }

    /// Whether the identity is expected to hold for complexified fields.
    pub fn holds_for_complex(&self) -> bool {
        matches!(self, IdentityKind::Skew | IdentityKind::StokesCommutator)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub kind: IdentityKind,
    /// `|sum of terms| / sum of term scales`.
    pub residual: f64,
    pub applicable: bool,
}

/// The field `w*` with coefficients `conj(w(-k))`, so that `(v, w*) = sum v(k) . w(-k)`.
pub fn conjugate_field(w: &SpectralField) -> SpectralField {
    let g = *w.grid();
    let coeffs = (0..g.len())
        .map(|i| {
            let m = w.coeffs()[g.mirror(i)];
            [m[0].conj(), m[1].conj()]
        })
        .collect();
    SpectralField::from_coeffs_unchecked(g, coeffs, w.symmetry())
}

/// Ladyzhenskaya-type size of `(B(a,b), c)`, used to normalize residuals.
fn triple_scale(a: &SpectralField, b: &SpectralField, c: &SpectralField) -> f64 {
    (a.norm() * a.sobolev_norm(1.0)).sqrt()
        * b.sobolev_norm(1.0)
        * (c.norm() * c.sobolev_norm(1.0)).sqrt()
}

fn pair(
    ws: &mut BilinearWorkspace,
    a: &SpectralField,
    b: &SpectralField,
    c: &SpectralField,
) -> Result<C64> {
    let bf = ws.eval(a, b)?;
    Ok(inner_raw(bf.grid(), bf.coeffs(), c.coeffs()))
}

/// Evaluates every identity on `(u, v, w)`.
pub fn identity_residuals(
    ws: &mut BilinearWorkspace,
    u: &SpectralField,
    v: &SpectralField,
    w: &SpectralField,
) -> Result<Vec<IdentityResidual>> {
    let real = [u, v, w].iter().all(|f| f.symmetry() == Symmetry::Real);
    let au = u.apply_power(1.0);
    let av = v.apply_power(1.0);
    let mut out = Vec::with_capacity(IdentityKind::ALL.len());
    for kind in IdentityKind::ALL {
        let (value, scale) = match kind {
            IdentityKind::Skew => {
                let (ws_, vs_) = (conjugate_field(w), conjugate_field(v));
                let t = pair(ws, u, v, &ws_)? + pair(ws, u, w, &vs_)?;
                (t.norm(), triple_scale(u, v, w) + triple_scale(u, w, v))
            }
            IdentityKind::EnstrophyOrthogonality => {
                (pair(ws, u, u, &au)?.norm(), triple_scale(u, u, &au))
            }
            IdentityKind::Transfer => {
                let t = pair(ws, &av, v, u)? - pair(ws, u, v, &av)?;
                (t.norm(), triple_scale(&av, v, u) + triple_scale(u, v, &av))
            }
            IdentityKind::CyclicSum => {
                let t = pair(ws, u, v, &av)? + pair(ws, v, u, &av)? + pair(ws, v, v, &au)?;
                (
                    t.norm(),
                    triple_scale(u, v, &av) + triple_scale(v, u, &av) + triple_scale(v, v, &au),
                )
            }
            IdentityKind::StokesCommutator => {
                let lhs = ws.eval(u, u)?.apply_power(1.0);
                let b1 = ws.eval(u, &au)?;
                let b2 = ws.eval(&au, u)?;
                let r = lhs
                    .axpy(C64::new(-1.0, 0.0), &b1)?
                    .axpy(C64::new(1.0, 0.0), &b2)?;
                let n = |s: f64| u.sobolev_norm(s);
                let scale = (n(0.0) * n(2.0)).sqrt() * n(3.0) + (n(1.0) * n(3.0)).sqrt() * n(2.0);
                (r.norm(), scale)
            }
        };
        out.push(IdentityResidual {
            kind,
            residual: if scale > 0.0 { value / scale } else { value },
            applicable: real || kind.holds_for_complex(),
        });
    }
    Ok(out)
}

/// Proven upper bounds on transfer terms and the two functional inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum Inequality {
    /// Real `u`: `|(B(u,u), A^2 u)| <= 2 c_L^2 |Au| |A^{3/2}u| |A^{1/2}u|`.
    RealSecondOrder,
    /// Real `u`: `|(B(u,u), A^3 u)| <= sqrt2 (sqrt2 c_L^2 + c_A) |u|^{1/2} |Au|^{1/2} |A^{3/2}u| |A^2 u|`.
    RealThirdOrder,
    /// Complex `u`: `|(B(u,u), Au)| <= 4 c_L^2 |u|^{1/2} |A^{1/2}u| |Au|^{3/2}`.
    ComplexFirstOrder,
    /// Complex `u`: `|(B(u,u), A^2 u)| <= 2 (2 c_L^2 + c_A) |u|^{1/2} |Au|^{3/2} |A^{3/2}u|`.
    ComplexSecondOrder,
    /// Complex `u`: `|(B(u,u), A^3 u)| <= 2 (2 c_L^2 + c_A) |u|^{1/2} |Au|^{3/2} |A^{5/2}u|`.
    ComplexThirdOrder,
    /// Real `u, v, w`, integer `alpha > 3`: the high-order transfer bound with prefactor `2^alpha c_A`.
    RealHighOrder(u32),
    /// Complex `u, v, w`: the same bound with prefactor `2^{alpha + 3/2} c_A`.
    ComplexHighOrder(u32),
    /// `|u|_{L^4} <= c_L |u|^{1/2} |A^{1/2}u|^{1/2}`, with `2 c_L` for complex `u`.
    Ladyzhenskaya,
    /// `|u|_inf <= c_A |u|^{1/2} |Au|^{1/2}` on grid samples, with `2 c_A` for complex `u`.
    Agmon,
}

impl Inequality {
    pub fn name(&self) -> String {
        match self {
            Inequality::RealSecondOrder => "real_second_order".into(),
            Inequality::RealThirdOrder => "real_third_order".into(),
            Inequality::ComplexFirstOrder => "complex_first_order".into(),
            Inequality::ComplexSecondOrder => "complex_second_order".into(),
            Inequality::ComplexThirdOrder => "complex_third_order".into(),
            Inequality::RealHighOrder(a) => format!("real_high_order_{a}"),
            Inequality::ComplexHighOrder(a) => format!("complex_high_order_{a}"),
            Inequality::Ladyzhenskaya => "ladyzhenskaya".into(),
            Inequality::Agmon => "agmon".into(),
        }
    }

    /// Symmetry of the sampled fields.
    pub fn symmetry(&self) -> Symmetry {
        match self {
            Inequality::RealSecondOrder
            | Inequality::RealThirdOrder
            | Inequality::RealHighOrder(_) => Symmetry::Real,
            Inequality::Ladyzhenskaya | Inequality::Agmon => Symmetry::Real,
            _ => Symmetry::Complex,
        }
    }

    pub fn needs_triple(&self) -> bool {
        matches!(
            self,
            Inequality::RealHighOrder(_) | Inequality::ComplexHighOrder(_)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityRatio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `lhs / rhs` for one inequality. Single-field bounds read only `u`.
pub fn inequality_ratio(
    ws: &mut BilinearWorkspace,
    kind: Inequality,
    u: &SpectralField,
    v: &SpectralField,
    w: &SpectralField,
) -> Result<InequalityRatio> {
    let cl = ladyzhenskaya();
    let ca = agmon();
    let n = |f: &SpectralField, a: f64| f.sobolev_norm(2.0 * a);
    let complex_factor = if u.symmetry() == Symmetry::Real {
        1.0
    } else {
        2.0
    };
    let transfer = |ws: &mut BilinearWorkspace, power: f64| -> Result<f64> {
        Ok(pair(ws, u, u, &u.apply_power(power))?.norm())
    };
    let (lhs, rhs) = match kind {
        Inequality::RealSecondOrder => (
            transfer(ws, 2.0)?,
            2.0 * cl * cl * n(u, 1.0) * n(u, 1.5) * n(u, 0.5),
        ),
        Inequality::RealThirdOrder => (
            transfer(ws, 3.0)?,
            2f64.sqrt()
                * (2f64.sqrt() * cl * cl + ca)
                * (n(u, 0.0) * n(u, 1.0)).sqrt()
                * n(u, 1.5)
                * n(u, 2.0),
        ),
        Inequality::ComplexFirstOrder => (
            transfer(ws, 1.0)?,
            4.0 * cl * cl * n(u, 0.0).sqrt() * n(u, 0.5) * n(u, 1.0).powf(1.5),
        ),
        Inequality::ComplexSecondOrder => (
            transfer(ws, 2.0)?,
            2.0 * (2.0 * cl * cl + ca) * n(u, 0.0).sqrt() * n(u, 1.0).powf(1.5) * n(u, 1.5),
        ),
        Inequality::ComplexThirdOrder => (
            transfer(ws, 3.0)?,
            2.0 * (2.0 * cl * cl + ca) * n(u, 0.0).sqrt() * n(u, 1.0).powf(1.5) * n(u, 2.5),
        ),
        Inequality::RealHighOrder(alpha) | Inequality::ComplexHighOrder(alpha) => {
            if alpha <= 3 {
                return Err(Error::InvalidArgument(format!(
                    "high-order bound needs alpha > 3, got {alpha}"
                )));
            }
            let a = alpha as f64;
            let pre = match kind {
                Inequality::RealHighOrder(_) => 2f64.powf(a) * ca,
                _ => 2f64.powf(a + 1.5) * ca,
            };
            let lhs = pair(ws, u, v, &w.apply_power(a))?.norm();
            let rhs = pre
                * ((n(u, 0.0) * n(u, 1.0)).sqrt() * n(v, (1.0 + a) / 2.0)
                    + n(u, a / 2.0) * (n(v, 0.5) * n(v, 1.5)).sqrt())
                * n(w, a / 2.0);
            (lhs, rhs)
        }
        Inequality::Ladyzhenskaya => {
            let l = lebesgue_norms(u);
            (l.l4, complex_factor * cl * (n(u, 0.0) * n(u, 0.5)).sqrt())
        }
        Inequality::Agmon => {
            let l = lebesgue_norms(u);
            (
                l.linf_sampled,
                complex_factor * ca * (n(u, 0.0) * n(u, 1.0)).sqrt(),
            )
        }
    };
    Ok(InequalityRatio {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { f64::NAN },
    })
}

/// Sampling plan for [`run_suite`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub k_max: usize,
    pub length: f64,
    pub samples: usize,
    pub seed: u64,
    pub inequalities: Vec<Inequality>,
    /// Also record identity residuals on real triples.
    pub identities: bool,
    /// Samples cycle through these envelopes.
    pub families: Vec<FieldFamily>,
}

impl SuiteConfig {
    pub fn standard(k_max: usize, samples: usize, seed: u64) -> Self {
        let mut inequalities = vec![
            Inequality::RealSecondOrder,
            Inequality::RealThirdOrder,
            Inequality::ComplexFirstOrder,
            Inequality::ComplexSecondOrder,
            Inequality::ComplexThirdOrder,
        ];
        for a in 4..=8 {
            inequalities.push(Inequality::RealHighOrder(a));
            inequalities.push(Inequality::ComplexHighOrder(a));
        }
        Self {
            k_max,
            length: 2.0 * std::f64::consts::PI,
            samples,
            seed,
            inequalities,
            identities: true,
            families: default_families(k_max),
        }
    }
}

/// Power-law, band-limited white and single-shell envelopes scaled to `K`.
pub fn default_families(k_max: usize) -> Vec<FieldFamily> {
    let k = k_max as f64;
    vec![
        FieldFamily::PowerLaw {
            slope: 1.0,
            cutoff: k / 3.0,
        },
        FieldFamily::WhiteInShell { k_lo: 1.0, k_hi: k },
        FieldFamily::PowerLaw {
            slope: 2.5,
            cutoff: k,
        },
        FieldFamily::WhiteInShell {
            k_lo: k / 2.0,
            k_hi: k,
        },
        FieldFamily::SingleShell { k_sq: 0 },
    ]
}

/// One row of the suite CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub name: String,
    pub sample_id: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub records: Vec<SuiteRecord>,
}

impl SuiteReport {
    /// Largest value recorded under `name`.
    pub fn max(&self, name: &str) -> Option<f64> {
        self.records
            .iter()
            .filter(|r| r.name == name)
            .map(|r| r.value)
            .reduce(f64::max)
    }

    pub fn count(&self, name: &str) -> usize {
        self.records.iter().filter(|r| r.name == name).count()
    }
}

fn sample_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

fn draw(
    grid: GridSpec,
    family: FieldFamily,
    sym: Symmetry,
    rng: &mut ChaCha8Rng,
) -> Result<SpectralField> {
    let family = match family {
        FieldFamily::SingleShell { k_sq } if k_sq <= 0 => {
            let shells = crate::spectral::available_shells(&grid);
            let pick = (rand::Rng::gen::<u64>(rng) % shells.len() as u64) as usize;
            FieldFamily::SingleShell { k_sq: shells[pick] }
        }
        f => f,
    };
    random_field(grid, family, sym, rng)
}

/// Samples fields and records every inequality ratio (and identity residual).
/// Each sample draws from its own stream, so results do not depend on thread count.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let grid = GridSpec::new(cfg.length, cfg.k_max)?;
    if cfg.families.is_empty() {
        return Err(Error::InvalidArgument(
            "suite needs at least one field family".into(),
        ));
    }
    let rows: Result<Vec<Vec<SuiteRecord>>> = (0..cfg.samples)
        .into_par_iter()
        .map_init(
            || BilinearWorkspace::new(&grid),
            |ws, id| {
                let mut rng = sample_rng(cfg.seed, id);
                let family = cfg.families[id % cfg.families.len()];
                let mut recs = Vec::new();
                let mut fields = std::collections::BTreeMap::new();
                for sym in [Symmetry::Real, Symmetry::Complex] {
                    let key = sym == Symmetry::Real;
                    let triple = (
                        draw(grid, family, sym, &mut rng)?,
                        draw(grid, family, sym, &mut rng)?,
                        draw(grid, family, sym, &mut rng)?,
                    );
                    fields.insert(key, triple);
                }
                for ineq in &cfg.inequalities {
                    let (u, v, w) = &fields[&(ineq.symmetry() == Symmetry::Real)];
                    let r = inequality_ratio(ws, *ineq, u, v, w)?;
                    recs.push(SuiteRecord {
                        name: ineq.name(),
                        sample_id: id,
                        value: r.ratio,
                    });
                }
                if cfg.identities {
                    let (u, v, w) = &fields[&true];
                    for r in identity_residuals(ws, u, v, w)? {
                        recs.push(SuiteRecord {
                            name: r.kind.name().into(),
                            sample_id: id,
                            value: r.residual,
                        });
                    }
                }
                Ok(recs)
            },
        )
        .collect();
    Ok(SuiteReport {
        records: rows?.into_iter().flatten().collect(),
    })
}

/// `name,sample_id,value` rows.
pub fn suite_csv(report: &SuiteReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}
