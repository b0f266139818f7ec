use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sveiqhr::config::{
    load_config, InitialPreset, InitialSpec, IntegratorSection, MethodName, OutputKind,
    ParameterOverrides, Scenario, ScenarioConfig, SweepSection,
};
use sveiqhr::dynamics::simulate;
use sveiqhr::equilibrium::{compute_r0, dfe_stability, endemic_equilibrium, endemic_stability};
use sveiqhr::error::{ConfigError, DynamicsError, EquilibriumError, StrategyError};
use sveiqhr::figures::{write_figures, FigureError};
use sveiqhr::format::fmt_f64;
use sveiqhr::model::ParamName;
use sveiqhr::strategy::{intervention_sweep, region_geometry, significance_ranking, SweepReport};

use crate::manifest::RunManifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Figure(#[from] FigureError),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "sveiqhr", version, about = "SVEIQHR epidemic model with interventions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the model and write the trajectory as CSV.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        integrator: IntegratorArgs,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the basic reproduction number.
    R0 {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Disease-free and endemic equilibria with stability, as JSON.
    Equilibria {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Sensitivity indices and significance ranks.
    Sensitivity {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        json: bool,
    },
    /// Intercepts of the R0 = 1 line and the feasible (u1, u2) region, as JSON.
    Region {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Rerun the simulation with boosted intervention rates.
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        integrator: IntegratorArgs,
        /// Comma-separated intervention rates to boost.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<ParamName>>,
        /// Comma-separated relative boosts, e.g. 0.3,0.6.
        #[arg(long, value_delimiter = ',')]
        boosts: Option<Vec<f64>>,
        #[arg(long)]
        json: bool,
    },
    /// Regenerate the data behind the figure panels, one CSV per panel.
    Figures {
        #[arg(long)]
        out: PathBuf,
    },
    /// Produce every output listed in a scenario file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
}

#[derive(Debug, Args, Default)]
pub struct ParamArgs {
    /// Scenario file whose settings the flags below override.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub u1: Option<f64>,
    #[arg(long)]
    pub u2: Option<f64>,
    #[arg(long)]
    pub u3: Option<f64>,
    #[arg(long)]
    pub u4: Option<f64>,
    #[arg(long)]
    pub u5: Option<f64>,
    /// Restriction level 1-4, instead of --u2.
    #[arg(long)]
    pub ppkm_level: Option<u8>,
    /// Any other parameter, as NAME=VALUE (repeatable).
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub set: Vec<String>,
    /// Initial condition preset.
    #[arg(long, value_enum)]
    pub initial: Option<PresetArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PresetArg {
    Default,
    DiseaseFree,
}

#[derive(Debug, Args, Default)]
pub struct IntegratorArgs {
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Days.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Days between stored samples.
    #[arg(long)]
    pub sample_interval: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Rk4,
    Rk45,
}

impl ParamArgs {
    /// Config file settings with command-line overrides applied.
    fn scenario_config(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => ScenarioConfig {
                outputs: vec![],
                parameters: ParameterOverrides::default(),
                initial: InitialSpec::default(),
                integrator: IntegratorSection::default(),
                sweep: SweepSection::default(),
            },
        };
        let o = &mut cfg.parameters;
        for (name, v) in [
            (ParamName::Delta, self.delta),
            (ParamName::U1, self.u1),
            (ParamName::U3, self.u3),
            (ParamName::U4, self.u4),
            (ParamName::U5, self.u5),
        ] {
            if v.is_some() {
                o.set(name, v);
            }
        }
        if self.u2.is_some() {
            o.u2 = self.u2;
            o.ppkm_level = None;
        }
        if self.ppkm_level.is_some() {
            o.ppkm_level = self.ppkm_level;
            o.u2 = None;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects NAME=VALUE, got `{kv}`")))?;
            let name: ParamName = k
                .trim()
                .parse()
                .map_err(|e: sveiqhr::ParamError| CliError::Usage(e.to_string()))?;
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("`{v}` is not a number")))?;
            o.set(name, Some(value));
            if name == ParamName::U2 {
                o.ppkm_level = None;
            }
        }
        if let Some(p) = self.initial {
            cfg.initial = InitialSpec::Preset {
                preset: match p {
                    PresetArg::Default => InitialPreset::Default,
                    PresetArg::DiseaseFree => InitialPreset::DiseaseFree,
                },
            };
        }
        Ok(cfg)
    }
}

impl IntegratorArgs {
    fn apply(&self, s: &mut IntegratorSection) {
        if let Some(m) = self.method {
            s.method = match m {
                MethodArg::Rk4 => MethodName::Rk4,
                MethodArg::Rk45 => MethodName::Rk45,
            };
        }
        for (slot, v) in [
            (&mut s.step, self.step),
            (&mut s.abs_tol, self.abs_tol),
            (&mut s.rel_tol, self.rel_tol),
            (&mut s.horizon, self.horizon),
            (&mut s.sample_interval, self.sample_interval),
        ] {
            if v.is_some() {
                *slot = v;
            }
        }
    }
}

fn to_pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("output types serialize")
}

fn equilibria_json(s: &Scenario) -> Result<Value, CliError> {
    Ok(json!({
        "r0": compute_r0(&s.params),
        "disease_free": dfe_stability(&s.params)?,
        "endemic": endemic_equilibrium(&s.params)?,
        "endemic_stability": endemic_stability(&s.params)?,
    }))
}

const SWEEP_CSV_HEADER: &str =
    "target,boost,value,r0,peak,peak_time,terminal,peak_reduction,terminal_reduction";

fn sweep_csv(rep: &SweepReport) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    out.push_str(&format!(
        "baseline,0,,{},{},{},{},0,0\n",
        fmt_f64(rep.baseline_r0),
        fmt_f64(rep.baseline.peak),
        fmt_f64(rep.baseline.peak_time),
        fmt_f64(rep.baseline.terminal)
    ));
    for r in &rep.runs {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.target.as_str(),
            r.boost,
            fmt_f64(r.value),
            fmt_f64(r.r0),
            fmt_f64(r.summary.peak),
            fmt_f64(r.summary.peak_time),
            fmt_f64(r.summary.terminal),
            fmt_f64(r.peak_reduction),
            fmt_f64(r.terminal_reduction),
        ));
    }
    out
}

fn region_for(cfg: &ScenarioConfig) -> Result<Value, CliError> {
    let mut o = cfg.parameters;
    let delta = o.delta.ok_or_else(|| ConfigError::Validation {
        field: "delta".into(),
        message: "required".into(),
    })?;
    if o.u2.is_none() && o.ppkm_level.is_none() {
        o.u2 = Some(0.0);
    }
    let g = region_geometry(&o.resolve()?, delta)?;
    Ok(serde_json::to_value(g).expect("serializable"))
}

/// Executes a parsed command, writing primary output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            params,
            integrator,
            out: path,
        } => {
            let mut cfg = params.scenario_config()?;
            integrator.apply(&mut cfg.integrator);
            let s = cfg.resolve()?;
            let traj = simulate(&s.params, &s.initial, &s.integrator)?;
            match path {
                Some(p) => fs::write(p, traj.to_csv_string())?,
                None => out.write_all(traj.to_csv_string().as_bytes())?,
            }
        }
        Command::R0 { params } => {
            let s = params.scenario_config()?.resolve()?;
            writeln!(out, "{}", serde_json::to_string(&compute_r0(&s.params)).expect("f64"))?;
        }
        Command::Equilibria { params } => {
            let s = params.scenario_config()?.resolve()?;
            writeln!(out, "{}", to_pretty(&equilibria_json(&s)?))?;
        }
        Command::Sensitivity { params, json } => {
            let s = params.scenario_config()?.resolve()?;
            let table = significance_ranking(&s.params)?;
            if json {
                writeln!(out, "{}", to_pretty(&table))?;
            } else {
                out.write_all(table.to_csv_string().as_bytes())?;
            }
        }
        Command::Region { params } => {
            let cfg = params.scenario_config()?;
            writeln!(out, "{}", to_pretty(&region_for(&cfg)?))?;
        }
        Command::Sweep {
            params,
            integrator,
            targets,
            boosts,
            json,
        } => {
            let mut cfg = params.scenario_config()?;
            integrator.apply(&mut cfg.integrator);
            if let Some(t) = targets {
                cfg.sweep.targets = t;
            }
            if let Some(b) = boosts {
                cfg.sweep.boosts = b;
            }
            let s = cfg.resolve()?;
            let rep = intervention_sweep(
                &s.params,
                &s.initial,
                &s.integrator,
                &s.sweep.targets,
                &s.sweep.boosts,
            )?;
            if json {
                writeln!(out, "{}", to_pretty(&rep))?;
            } else {
                out.write_all(sweep_csv(&rep).as_bytes())?;
            }
        }
        Command::Figures { out: dir } => {
            let start = Instant::now();
            let paths = write_figures(&dir)?;
            let manifest = RunManifest::new(json!({ "command": "figures" }), &paths, start);
            manifest.write(&dir)?;
            for p in &paths {
                writeln!(out, "{}", p.display())?;
            }
        }
        Command::Run { config, out: dir } => {
            let start = Instant::now();
            let cfg = load_config(&config)?;
            let paths = run_scenario(&cfg, &dir)?;
            let echo = serde_json::to_value(&cfg).expect("serializable");
            RunManifest::new(echo, &paths, start).write(&dir)?;
            for p in &paths {
                writeln!(out, "{}", p.display())?;
            }
        }
        Command::Serve { bind } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(crate::service::serve(&bind))?;
        }
    }
    Ok(())
}

/// Writes each requested output of a scenario into `dir`.
pub fn run_scenario(cfg: &ScenarioConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let s = cfg.resolve()?;
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let mut outputs = s.outputs.clone();
    outputs.sort();
    outputs.dedup();
    for kind in outputs {
        let (name, text) = match kind {
            OutputKind::Trajectory => (
                "trajectory.csv",
                simulate(&s.params, &s.initial, &s.integrator)?.to_csv_string(),
            ),
            OutputKind::R0 => (
                "r0.json",
                to_pretty(&json!({ "r0": compute_r0(&s.params) })),
            ),
            OutputKind::Equilibria => ("equilibria.json", to_pretty(&equilibria_json(&s)?)),
            OutputKind::Sensitivity => (
                "sensitivity.csv",
                significance_ranking(&s.params)?.to_csv_string(),
            ),
            OutputKind::Region => ("region.json", to_pretty(&region_for(cfg)?)),
            OutputKind::Sweep => {
                let rep = intervention_sweep(
                    &s.params,
                    &s.initial,
                    &s.integrator,
                    &s.sweep.targets,
                    &s.sweep.boosts,
                )?;
                ("sweep.csv", sweep_csv(&rep))
            }
        };
        let path = dir.join(name);
        fs::write(&path, text)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Parses `args`, runs, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
