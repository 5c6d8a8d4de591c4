use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{IntegratorConfig, PhysicalSetup, SteadyOptions, StripOptions};
use crate::error::{Error, Result};
use crate::ledger::{LedgerOptions, TableMode};
use crate::spectral::{io, FieldFamily, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constants,
    Simulate,
    Ray,
    VerifyStrip,
    Steady,
    SigmaFit,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Simulate => "simulate",
            Command::Ray => "ray",
            Command::VerifyStrip => "verify-strip",
            Command::Steady => "steady",
            Command::SigmaFit => "sigma-fit",
        }
    }
}

/// Everything one run needs. Unknown keys are rejected at every level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// When present it must agree with the command being run.
    pub experiment: Option<Command>,
    pub seed: u64,
    pub setup: SetupConfig,
    pub initial: InitialCondition,
    pub integrator: IntegratorSettings,
    pub simulate: SimulateConfig,
    pub ray: RayConfig,
    pub verify_strip: VerifyConfig,
    pub constants: ConstantsConfig,
    pub steady: SteadyOptions,
    pub sigma_fit: SigmaFitConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            seed: 0,
            setup: SetupConfig::default(),
            initial: InitialCondition::Zero,
            integrator: IntegratorSettings::default(),
            simulate: SimulateConfig::default(),
            ray: RayConfig::default(),
            verify_strip: VerifyConfig::default(),
            constants: ConstantsConfig::default(),
            steady: SteadyOptions::default(),
            sigma_fit: SigmaFitConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SetupConfig {
    pub nu: f64,
    pub length: f64,
    pub k_max: usize,
    pub force: ForceConfig,
}

impl Default for SetupConfig {
    fn default() -> Self {
        Self {
            nu: 1.0,
            length: 2.0 * PI,
            k_max: 32,
            force: ForceConfig::Kolmogorov {
                k_f: 2,
                grashof: 1.0,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForceConfig {
    /// `gamma (sin(kappa0 k_f x2), 0)` with `gamma` set by the Grashof number.
    Kolmogorov {
        k_f: i64,
        grashof: f64,
    },
    /// Snapshot file; rescaled when `grashof` is given.
    File {
        path: PathBuf,
        #[serde(default)]
        grashof: Option<f64>,
    },
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Zero,
    /// Random real field; `enstrophy` prescribes `|A^{1/2} u0| / (nu kappa0)`.
    Random {
        family: FieldFamily,
        #[serde(default)]
        enstrophy: Option<f64>,
    },
    File {
        path: PathBuf,
    },
}

/// Integrator fields left out fall back to `IntegratorConfig::default_for`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSettings {
    pub dt: Option<f64>,
    pub error_estimation: Option<bool>,
    pub blowup_threshold: Option<f64>,
    pub sample_every: Option<usize>,
    pub snapshot_every: Option<usize>,
    pub nonlinear: Option<bool>,
    pub alphas: Option<Vec<f64>>,
}

impl IntegratorSettings {
    pub fn resolve(&self, setup: &PhysicalSetup) -> IntegratorConfig {
        let d = IntegratorConfig::default_for(setup);
        IntegratorConfig {
            dt: self.dt.unwrap_or(d.dt),
            error_estimation: self.error_estimation.unwrap_or(d.error_estimation),
            blowup_threshold: self.blowup_threshold.or(d.blowup_threshold),
            sample_every: self.sample_every.unwrap_or(d.sample_every),
            snapshot_every: self.snapshot_every.or(d.snapshot_every),
            nonlinear: self.nonlinear.unwrap_or(d.nonlinear),
            alphas: self.alphas.clone().unwrap_or(d.alphas),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub t_end: f64,
    /// Write the final field with a binary sidecar instead of inline JSON.
    pub sidecar: bool,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            t_end: 10.0,
            sidecar: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RayConfig {
    /// Real-time integration before the ray starts; the ray anchor is `t0 = transient`.
    pub transient: f64,
    pub theta: f64,
    pub rho_end: f64,
}

impl Default for RayConfig {
    fn default() -> Self {
        Self {
            transient: 0.0,
            theta: 0.0,
            rho_end: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub table: TableMode,
    pub sweep: StripOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            table: TableMode::ConditionalFixedStrip,
            sweep: StripOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    pub ledger: LedgerOptions,
    /// Class exponents of the force for which the propagation chain is evaluated.
    pub sigmas: Vec<f64>,
    pub c0: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self {
            ledger: LedgerOptions::default(),
            sigmas: vec![1.0],
            c0: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigmaFitConfig {
    /// CSV with header `alpha,value`.
    pub profile: Option<PathBuf>,
    /// Divide by `nu kappa0^alpha` (taken from the setup) before fitting.
    pub normalized: bool,
}

impl Default for SigmaFitConfig {
    fn default() -> Self {
        Self {
            profile: None,
            normalized: true,
        }
    }
}

/// Applies `a.b.c=value` to a JSON tree. The value is parsed as JSON and kept as a
/// string when that fails; missing intermediate objects are created. Setting a
/// different `kind` drops the other fields of that object.
pub fn apply_override(root: &mut Value, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{spec}` is not of the form key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("empty key in override `{spec}`")));
    }
    let mut node = root;
    for (i, key) in keys.iter().enumerate() {
        if !node.is_object() {
            if node.is_null() {
                *node = Value::Object(Default::default());
            } else {
                return Err(Error::Config(format!(
                    "`{}` is not an object",
                    keys[..i].join(".")
                )));
            }
        }
        let map = node.as_object_mut().expect("object");
        if i + 1 == keys.len() {
            if *key == "kind" && map.get("kind").is_some_and(|k| *k != value) {
                map.clear();
            }
            map.insert(key.to_string(), value);
            return Ok(());
        }
        node = map.entry(key.to_string()).or_insert(Value::Null);
    }
    unreachable!("loop returns on the last key")
}

/// Recursively merges `patch` into `base`. Objects whose `kind` changes are replaced whole.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p))
            if b.get("kind").is_none()
                || p.get("kind").is_none_or(|k| Some(k) == b.get("kind")) =>
        {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, p) => *slot = p,
    }
}

/// Merges the config file over the defaults, applies overrides, and validates.
/// Returns the parsed config together with its resolved JSON form.
pub fn load_config(
    path: Option<&Path>,
    overrides: &[String],
    seed: Option<u64>,
) -> Result<(RunConfig, Value)> {
    let mut root = serde_json::to_value(RunConfig::default())?;
    if let Some(p) = path {
        let text = std::fs::read_to_string(p)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
        let file: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
        if !file.is_object() {
            return Err(Error::Config(format!(
                "{}: top level must be an object",
                p.display()
            )));
        }
        merge(&mut root, file);
    }
    for o in overrides {
        apply_override(&mut root, o)?;
    }
    if let Some(s) = seed {
        apply_override(&mut root, &format!("seed={s}"))?;
    }
    let cfg: RunConfig = serde_json::from_value(root).map_err(|e| Error::Config(e.to_string()))?;
    let resolved = serde_json::to_value(&cfg)?;
    Ok((cfg, resolved))
}

impl SetupConfig {
    /// Builds the physical setup; relative force paths are resolved against `base`.
    pub fn build(&self, base: &Path) -> Result<PhysicalSetup> {
        let grid =
            GridSpec::new(self.length, self.k_max).map_err(|e| Error::Config(e.to_string()))?;
        let setup = match &self.force {
            ForceConfig::Kolmogorov { k_f, grashof } => {
                PhysicalSetup::kolmogorov(grid, self.nu, *k_f, *grashof)
            }
            ForceConfig::None => PhysicalSetup::unforced(grid, self.nu),
            ForceConfig::File { path, grashof } => {
                let g = io::read_snapshot(&base.join(path))?;
                if !g.grid().same_as(&grid) {
                    return Err(Error::Config(
                        "force snapshot grid differs from the configured grid".into(),
                    ));
                }
                match grashof {
                    Some(gr) => PhysicalSetup::with_grashof(self.nu, g, *gr),
                    None => PhysicalSetup::new(self.nu, g),
                }
            }
        };
        setup.map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_reach_nested_keys() {
        let mut v = serde_json::json!({"setup": {"nu": 1.0}});
        apply_override(&mut v, "setup.force.grashof=5").unwrap();
        apply_override(&mut v, "setup.force.kind=kolmogorov").unwrap();
        apply_override(&mut v, "setup.nu=0.5").unwrap();
        assert_eq!(v["setup"]["force"]["grashof"], 5.0);
        assert_eq!(v["setup"]["force"]["kind"], "kolmogorov");
        assert_eq!(v["setup"]["nu"], 0.5);
        assert!(apply_override(&mut v, "setup.nu.x=1").is_err());
        assert!(apply_override(&mut v, "novalue").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = load_config(None, &["setup.viscosity=2".into()], None).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let (cfg, _) = load_config(None, &["ray.theta=0.3".into()], Some(9)).unwrap();
        assert_eq!(cfg.ray.theta, 0.3);
        assert_eq!(cfg.seed, 9);
        let (cfg, _) = load_config(None, &["setup.force.kind=none".into()], None).unwrap();
        assert_eq!(cfg.setup.force, ForceConfig::None);
        let (cfg, _) = load_config(None, &["setup.force.grashof=5".into()], None).unwrap();
        assert_eq!(
            cfg.setup.force,
            ForceConfig::Kolmogorov {
                k_f: 2,
                grashof: 5.0
            }
        );
    }
}
