//! Experiment runner behind the `nse-lab` command line: configuration,
//! command dispatch, artifact files and run manifests.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use config::{
    apply_override, load_config, Command, ConstantsConfig, ForceConfig, InitialCondition,
    IntegratorSettings, RayConfig, RunConfig, SetupConfig, SigmaFitConfig, SimulateConfig,
    VerifyConfig,
};

use crate::dynamics::{
    balance_monitor, decay_bound_excess, integrate_ray, integrate_real, steady_state_solve,
    verify_strip, PhysicalSetup, RaySpec, TrajectoryRecord,
};
use crate::error::{Error, Result};
use crate::ledger::{
    build_table, crossover, sigma_propagation, LedgerConstants, SigmaPipeline, TableMode,
};
use crate::sigma_class::{estimate_sigma, Scaling};
use crate::spectral::{io, random_field, NormProfile, SpectralField, Symmetry};

/// Process exit status for a finished run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The run completed but a bound was violated.
    BoundViolation,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::BoundViolation => 4,
        }
    }
}

/// 2 for configuration or input problems, 3 for numerical failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::InvalidRay(_)
        | Error::InvalidGrid(_)
        | Error::GridMismatch
        | Error::Format(_)
        | Error::Json(_)
        | Error::Csv(_)
        | Error::Io(_)
        | Error::Invariant(_)
        | Error::Degenerate(_) => 2,
        Error::IntegrationFailed(_) | Error::NotConverged { .. } => 3,
    }
}

#[derive(Clone, Debug)]
pub struct RunRequest {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub overrides: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: Status,
    /// One-line description for the terminal.
    pub summary: String,
    pub files: Vec<PathBuf>,
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.files
            .push((name.to_string(), hex(&Sha256::digest(bytes))));
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn field(&mut self, stem: &str, u: &SpectralField, sidecar: bool) -> Result<()> {
        if sidecar {
            io::write_with_sidecar(u, &self.dir, stem)?;
            for name in [format!("{stem}.bin"), format!("{stem}.json")] {
                let bytes = fs::read(self.dir.join(&name))?;
                self.files.push((name, hex(&Sha256::digest(&bytes))));
            }
            Ok(())
        } else {
            self.write(&format!("{stem}.json"), io::to_json(u)?.as_bytes())
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 over everything in the manifest except the `created` timestamp.
pub fn content_hash(manifest: &Value) -> String {
    let mut m = manifest.clone();
    if let Some(obj) = m.as_object_mut() {
        obj.remove("created");
        obj.remove("content_hash");
    }
    hex(&Sha256::digest(
        serde_json::to_string(&m).expect("json value").as_bytes(),
    ))
}

/// Loads the configuration, runs one command and writes its artifacts and
/// `manifest.json` into `req.out`.
pub fn run(req: &RunRequest) -> Result<RunOutcome> {
    let (cfg, resolved) = load_config(req.config.as_deref(), &req.overrides, req.seed)?;
    if let Some(e) = cfg.experiment {
        if e != req.command {
            return Err(Error::Config(format!(
                "config declares experiment `{}` but `{}` was requested",
                e.name(),
                req.command.name()
            )));
        }
    }
    let base = req
        .config
        .as_deref()
        .and_then(Path::parent)
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let setup = cfg.setup.build(&base)?;
    let mut art = Artifacts::new(&req.out)?;
    let (status, summary) = match req.command {
        Command::Constants => cmd_constants(&cfg, &setup, &mut art)?,
        Command::Simulate => cmd_simulate(&cfg, &setup, &base, &mut art)?,
        Command::Ray => cmd_ray(&cfg, &setup, &base, &mut art)?,
        Command::VerifyStrip => cmd_verify_strip(&cfg, &setup, &base, &mut art)?,
        Command::Steady => cmd_steady(&cfg, &setup, &mut art)?,
        Command::SigmaFit => cmd_sigma_fit(&cfg, &setup, &base, &mut art)?,
    };
    let mut manifest = json!({
        "tool": "nse-lab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": req.command.name(),
        "seed": cfg.seed,
        "config": resolved,
        "setup": setup.summary(),
        "files": art.files.iter().map(|(n, h)| json!({"name": n, "sha256": h})).collect::<Vec<_>>(),
        "status": status.code(),
    });
    let hash = content_hash(&manifest);
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let obj = manifest.as_object_mut().expect("object");
    obj.insert("content_hash".into(), json!(hash));
    obj.insert("created".into(), json!(created));
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(art.dir.join("manifest.json"), text)?;
    let mut files: Vec<PathBuf> = art.files.iter().map(|(n, _)| art.dir.join(n)).collect();
    files.push(art.dir.join("manifest.json"));
    Ok(RunOutcome {
        status,
        summary,
        files,
    })
}

fn initial_field(cfg: &RunConfig, setup: &PhysicalSetup, base: &Path) -> Result<SpectralField> {
    let grid = *setup.grid();
    match &cfg.initial {
        InitialCondition::Zero => Ok(SpectralField::zeros(grid, Symmetry::Real)),
        InitialCondition::File { path } => {
            let u = io::read_snapshot(&base.join(path))?;
            if !u.grid().same_as(&grid) {
                return Err(Error::Config(
                    "initial snapshot grid differs from the configured grid".into(),
                ));
            }
            Ok(u)
        }
        InitialCondition::Random { family, enstrophy } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let u = random_field(grid, *family, Symmetry::Real, &mut rng)?;
            match enstrophy {
                Some(x) => u.normalized(1.0, x * setup.nu() * setup.kappa0()),
                None => Ok(u),
            }
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

/// Long-format rows `re_zeta, im_zeta, theta, rho, alpha, norm_value, bound_value, margin`.
/// `bound(alpha_index, sample_index)` may decline to give a bound.
fn trajectory_csv(
    traj: &TrajectoryRecord,
    bound: impl Fn(usize, usize) -> Option<f64>,
) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "re_zeta",
        "im_zeta",
        "theta",
        "rho",
        "alpha",
        "norm_value",
        "bound_value",
        "margin",
    ])?;
    let alphas = &traj.metadata.config.alphas;
    for (si, s) in traj.samples.iter().enumerate() {
        for (ai, (&a, &v)) in alphas.iter().zip(&s.norms).enumerate() {
            let b = bound(ai, si);
            let margin = b.map(|b| if v > 0.0 { b / v } else { f64::INFINITY });
            w.write_record([
                format!("{:e}", s.zeta.re),
                format!("{:e}", s.zeta.im),
                format!("{:e}", traj.metadata.ray.theta),
                format!("{:e}", s.rho),
                format!("{a}"),
                format!("{v:e}"),
                opt(b),
                opt(margin),
            ])?;
        }
    }
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

fn failure_error(traj: &TrajectoryRecord) -> Option<Error> {
    traj.failure.as_ref().map(|f| {
        Error::IntegrationFailed(format!(
            "{:?} at step {} (rho = {:e}, |A^1/2 u| = {:e})",
            f.kind, f.step, f.rho, f.gradient_norm
        ))
    })
}

#[derive(Serialize)]
struct ConstantsReport<'a> {
    constants: &'a LedgerConstants,
    warnings: Vec<String>,
    enstrophy_comparison: Option<crate::ledger::EnstrophyComparison>,
    crossover_alpha: Option<usize>,
    tables: Vec<crate::ledger::BoundTable>,
    sigma_propagation: Vec<SigmaPipeline>,
}

fn cmd_constants(
    cfg: &RunConfig,
    setup: &PhysicalSetup,
    art: &mut Artifacts,
) -> Result<(Status, String)> {
    let opts = &cfg.constants.ledger;
    let c = LedgerConstants::from_setup(setup, opts.alpha_max)?;
    let mut warnings: Vec<String> = Vec::new();
    let mut tables = Vec::new();
    for mode in [
        TableMode::ConditionalFixedStrip,
        TableMode::ConditionalShrinking,
        TableMode::Unconditional,
    ] {
        let t = build_table(mode, &c, opts)?;
        for w in &t.warnings {
            if !warnings.contains(w) {
                warnings.push(w.clone());
            }
        }
        tables.push(t);
    }
    let sigma = cfg
        .constants
        .sigmas
        .iter()
        .map(|&s| sigma_propagation(s, cfg.constants.c0, &c))
        .collect::<Result<Vec<_>>>()?;
    let mut csv_text = String::new();
    for (i, t) in tables.iter().enumerate() {
        let body = t.to_csv()?;
        csv_text.push_str(if i == 0 {
            &body
        } else {
            body.split_once('\n').map(|x| x.1).unwrap_or("")
        });
    }
    art.write("ledger.csv", csv_text.as_bytes())?;
    let report = ConstantsReport {
        constants: &c,
        enstrophy_comparison: c.enstrophy_comparison(),
        crossover_alpha: crossover(&tables[0], &tables[1]),
        warnings: warnings.clone(),
        tables,
        sigma_propagation: sigma,
    };
    art.json("ledger.json", &report)?;
    let summary = format!(
        "ledger to alpha = {} written; {} warning(s)",
        opts.alpha_max,
        warnings.len()
    );
    Ok((Status::Ok, summary))
}

fn cmd_simulate(
    cfg: &RunConfig,
    setup: &PhysicalSetup,
    base: &Path,
    art: &mut Artifacts,
) -> Result<(Status, String)> {
    let u0 = initial_field(cfg, setup, base)?;
    let mut icfg = cfg.integrator.resolve(setup);
    for a in [0.0, 1.0] {
        if !icfg.alphas.contains(&a) {
            icfg.alphas.push(a);
        }
    }
    let traj = integrate_real(&u0, setup, cfg.simulate.t_end, &icfg)?;
    let rate = setup.rate();
    let samples = &traj.samples;
    let x0: Vec<f64> = samples[0].norms.iter().map(|v| v * v).collect();
    let pathwise = |ai: usize, si: usize| -> Option<f64> {
        let s = icfg.alphas[ai];
        if s != 0.0 && s != 1.0 {
            return None;
        }
        let e = (-rate * samples[si].zeta.re).exp();
        let cap = (setup.nu() * setup.kappa0().powf(s) * setup.grashof()).powi(2);
        Some((e * x0[ai] + (1.0 - e) * cap).sqrt())
    };
    art.write("trajectory.csv", &trajectory_csv(&traj, pathwise)?)?;
    art.field("final", &traj.final_field, cfg.simulate.sidecar)?;
    let energy_excess = decay_bound_excess(&traj, setup, 0.0)?;
    let enstrophy_excess = decay_bound_excess(&traj, setup, 1.0)?;
    let balance = balance_monitor(&traj, setup).ok().map(|b| b.max_relative());
    let report = json!({
        "setup": setup.summary(),
        "integrator": icfg,
        "t_end": cfg.simulate.t_end,
        "steps": traj.metadata.steps,
        "step": traj.metadata.step,
        "completed": traj.completed(),
        "failure": traj.failure,
        "final_norms": traj.samples.last().map(|s| s.norms.clone()),
        "energy_decay_excess": energy_excess,
        "enstrophy_decay_excess": enstrophy_excess,
        "decay_conforms": energy_excess <= 1e-10 && enstrophy_excess <= 1e-10,
        "balance_max_relative": balance,
    });
    art.json("report.json", &report)?;
    if let Some(e) = failure_error(&traj) {
        return Err(e);
    }
    let summary = format!(
        "t = {} reached in {} steps; energy decay excess {:e}, enstrophy decay excess {:e}",
        cfg.simulate.t_end, traj.metadata.steps, energy_excess, enstrophy_excess
    );
    Ok((Status::Ok, summary))
}

fn cmd_ray(
    cfg: &RunConfig,
    setup: &PhysicalSetup,
    base: &Path,
    art: &mut Artifacts,
) -> Result<(Status, String)> {
    let r = &cfg.ray;
    if r.theta.abs() > std::f64::consts::FRAC_PI_4 * (1.0 + 1e-12) || !r.theta.is_finite() {
        return Err(Error::InvalidRay(r.theta));
    }
    let u0 = initial_field(cfg, setup, base)?;
    let icfg = cfg.integrator.resolve(setup);
    let start = if r.transient > 0.0 {
        let pre = integrate_real(&u0, setup, r.transient, &icfg)?;
        if let Some(e) = failure_error(&pre) {
            return Err(e);
        }
        pre.final_field
    } else {
        u0
    };
    let ray = RaySpec {
        t0: r.transient,
        theta: r.theta,
        rho_end: r.rho_end,
    };
    let traj = integrate_ray(&start, setup, ray, &icfg)?;
    art.write("trajectory.csv", &trajectory_csv(&traj, |_, _| None)?)?;
    art.field("final", &traj.final_field, false)?;
    art.json(
        "report.json",
        &json!({
            "setup": setup.summary(),
            "integrator": icfg,
            "ray": ray,
            "steps": traj.metadata.steps,
            "completed": traj.completed(),
            "failure": traj.failure,
            "final_norms": traj.samples.last().map(|s| s.norms.clone()),
        }),
    )?;
    if let Some(e) = failure_error(&traj) {
        return Err(e);
    }
    Ok((
        Status::Ok,
        format!("ray theta = {} integrated to rho = {}", r.theta, r.rho_end),
    ))
}

fn cmd_verify_strip(
    cfg: &RunConfig,
    setup: &PhysicalSetup,
    base: &Path,
    art: &mut Artifacts,
) -> Result<(Status, String)> {
    let v = &cfg.verify_strip;
    let u0 = initial_field(cfg, setup, base)?;
    let amax = v.sweep.alphas.iter().copied().max().unwrap_or(1).max(3);
    let c = LedgerConstants::from_setup(setup, amax)?;
    let opts = crate::ledger::LedgerOptions {
        alpha_max: amax,
        ..cfg.constants.ledger.clone()
    };
    let table = build_table(v.table, &c, &opts)?;
    let mut sweep = v.sweep.clone();
    if sweep.integrator.is_none() {
        sweep.integrator = Some(cfg.integrator.resolve(setup));
    }
    let report = verify_strip(&u0, setup, &table, &sweep)?;
    art.write("margins.csv", report.to_csv()?.as_bytes())?;
    art.json("report.json", &report)?;
    let status = if report.passed() {
        Status::Ok
    } else {
        Status::BoundViolation
    };
    let summary = format!(
        "{} strip points, {} real-axis points; min margin {:.6}, min real-axis margin {:.6}, {} counterexample(s)",
        report.points.len(),
        report.real_axis.len(),
        report.min_margin,
        report.min_real_margin,
        report.counterexamples.len()
    );
    Ok((status, summary))
}

fn cmd_steady(
    cfg: &RunConfig,
    setup: &PhysicalSetup,
    art: &mut Artifacts,
) -> Result<(Status, String)> {
    let st = steady_state_solve(setup, &cfg.steady)?;
    let gnorm = setup.force().norm();
    art.field("steady", &st.field, false)?;
    art.json(
        "report.json",
        &json!({
            "setup": setup.summary(),
            "options": cfg.steady,
            "iterations": st.iterations,
            "residual": st.residual,
            "relative_residual": if gnorm > 0.0 { st.residual / gnorm } else { st.residual },
            "norm": st.field.norm(),
            "enstrophy_norm": st.field.sobolev_norm(1.0),
            "single_point_regime": setup.single_point_regime(),
        }),
    )?;
    Ok((
        Status::Ok,
        format!(
            "steady state after {} iterations, residual {:e}",
            st.iterations, st.residual
        ),
    ))
}

/// Reads an `alpha,value` CSV.
pub fn read_profile(path: &Path) -> Result<NormProfile> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Format(format!("profile CSV lacks a `{name}` column")))
    };
    let (ia, iv) = (col("alpha")?, col("value")?);
    let mut p = NormProfile {
        alphas: Vec::new(),
        values: Vec::new(),
    };
    for rec in rdr.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Format(format!("bad number in profile row {rec:?}")))
        };
        p.alphas.push(num(ia)?);
        p.values.push(num(iv)?);
    }
    Ok(p)
}

fn cmd_sigma_fit(
    cfg: &RunConfig,
    setup: &PhysicalSetup,
    base: &Path,
    art: &mut Artifacts,
) -> Result<(Status, String)> {
    let path = cfg
        .sigma_fit
        .profile
        .as_ref()
        .ok_or_else(|| Error::Config("sigma_fit.profile is required".into()))?;
    let profile = read_profile(&base.join(path))?;
    let scaling = if cfg.sigma_fit.normalized {
        Scaling::Normalized {
            nu: setup.nu(),
            kappa0: setup.kappa0(),
        }
    } else {
        Scaling::Raw
    };
    let fit = estimate_sigma(&profile, scaling)?;
    art.json(
        "report.json",
        &json!({
            "sigma_hat": fit.sigma_hat,
            "c0_hat": fit.c0_hat,
            "residual": fit.residual,
            "mode": scaling.name(),
            "log_linear": fit.log_linear,
            "log_linear_residual": fit.log_linear_residual,
            "points": fit.points,
        }),
    )?;
    let note = if fit.log_linear {
        " (profile is log-linear in alpha; estimate not meaningful)"
    } else {
        ""
    };
    Ok((
        Status::Ok,
        format!(
            "sigma_hat = {:e}, c0_hat = {:e}{note}",
            fit.sigma_hat, fit.c0_hat
        ),
    ))
}
