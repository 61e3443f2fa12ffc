//! Front end for the `nearby` binary: reads curve data and scenario files,
//! runs the pipeline and writes JSON/DOT reports into the output directory.
//!
//! Exit codes: 0 success; 1 an output file could not be written; 2 bad
//! flags, unreadable or malformed input; 3 well-formed input that violates a
//! contract (infeasible contact data, inconsistent scenario).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nearby_core::curve::milnor_from_branch_data;
use nearby_core::hodge::{assemble_invariant, InvariantSummary, MhsSummary, NilpotentOps};
use nearby_core::resolution::{build_resolution_graph, lcm_d, mu_from_resolution, ResKind};
use nearby_core::semistable::{semistable_reduce, verify_h1_dimension, H1Report};
use nearby_core::{run_pipeline, Alphabet, CurveSpec, PipelineError, Scalar};
use nearby_dga::omega::{scenario_omega, OmegaReport, OmegaScenario};
use nearby_paths::numeric::{run_numeric, NumericReport, NumericScenario, DEFAULT_GRID, DEFAULT_TOLERANCE};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {reason}")]
    Read { path: PathBuf, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("cannot write {path}: {reason}")]
    Write { path: PathBuf, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Write { .. } => 1,
            CliError::Usage(_) | CliError::Read { .. } | CliError::Parse(_) => 2,
            CliError::Contract(_) => 3,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Contract(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Embedded resolution graph and the report (e_i, d, μ).
    Resolve,
    /// Central fiber after semistable reduction and the H¹ check.
    Semistable,
    /// Weight-graded dimensions and the operators N, M, T, L.
    Hodge,
    /// Orbit sizes, graded dimensions, L and constancy flags per s.
    Invariant,
    /// The chain scenario: [N(Ω)], [M(Ω)], [L(Ω)].
    BarDemo,
    /// ε-integrals on the node chart, extrapolated and compared.
    IntegrateDemo,
}

#[derive(Debug, Parser)]
#[command(name = "nearby", version, about = "Nearby fundamental group toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Curve data (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Bound on the length filtration.
    #[arg(long, global = true, default_value_t = 2)]
    pub s: u32,
    /// Comma-separated ε values.
    #[arg(long, global = true, value_delimiter = ',')]
    pub epsilon_grid: Vec<f64>,
    /// Scenario file (JSON, or TOML by extension).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Also write graphs as DOT.
    #[arg(long, global = true)]
    pub dot: bool,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub s: u32,
    pub epsilon_grid: Vec<f64>,
    pub scenario: Option<PathBuf>,
    pub dot: bool,
    pub jobs: Option<usize>,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        RunConfig {
            command: c.command,
            input: c.input,
            out: c.out,
            s: c.s,
            epsilon_grid: if c.epsilon_grid.is_empty() { DEFAULT_GRID.to_vec() } else { c.epsilon_grid },
            scenario: c.scenario,
            dot: c.dot,
            jobs: c.jobs,
        }
    }
}

impl RunConfig {
    pub fn new(command: Command, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            input: None,
            out: out.into(),
            s: 2,
            epsilon_grid: DEFAULT_GRID.to_vec(),
            scenario: None,
            dot: false,
            jobs: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.s < 1 {
            return Err(CliError::Usage("--s must be at least 1".into()));
        }
        if self.epsilon_grid.len() < 2 {
            return Err(CliError::Usage("--epsilon-grid needs at least two values".into()));
        }
        if let Some(e) = self.epsilon_grid.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(CliError::Usage(format!("ε = {e} is not in (0, 1)")));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        for p in self.input.iter().chain(self.scenario.iter()) {
            if !p.is_file() {
                return Err(CliError::Read { path: p.clone(), reason: "no such file".into() });
            }
        }
        Ok(())
    }
}

/// Runs one command and returns the files it wrote.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::Resolve => cmd_resolve(cfg),
        Command::Semistable => cmd_semistable(cfg),
        Command::Hodge => cmd_hodge(cfg),
        Command::Invariant => cmd_invariant(cfg),
        Command::BarDemo => cmd_bar_demo(cfg),
        Command::IntegrateDemo => cmd_integrate_demo(cfg),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Read { path: path.to_path_buf(), reason: e.to_string() })
}

fn read_curve(cfg: &RunConfig) -> Result<CurveSpec, CliError> {
    let path = cfg.input.as_ref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    CurveSpec::from_json(&read(path)?).map_err(|e| CliError::Parse(e.to_string()))
}

/// Reads a JSON file, or TOML when the extension says so.
fn read_structured<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))
    } else {
        serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))
    }
}

/// Pretty JSON with a trailing newline; key order follows the struct fields.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn write(cfg: &RunConfig, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let err = |path: &Path, e: std::io::Error| CliError::Write { path: path.to_path_buf(), reason: e.to_string() };
    fs::create_dir_all(&cfg.out).map_err(|e| err(&cfg.out, e))?;
    let path = cfg.out.join(name);
    fs::write(&path, contents).map_err(|e| err(&path, e))?;
    written.push(path);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolveReport {
    /// Multiplicities `e_i` of the exceptional curves.
    pub e: Vec<u64>,
    pub d: u64,
    pub mu: u64,
    pub mu_resolution: u64,
    pub r: usize,
    pub minimal: bool,
}

pub fn cmd_resolve(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let c = read_curve(cfg)?;
    let g = build_resolution_graph(&c).map_err(|e| CliError::Contract(e.to_string()))?;
    let mu = milnor_from_branch_data(&c).map_err(|e| CliError::Contract(e.to_string()))?;
    let report = ResolveReport {
        e: g.vertices.iter().filter(|v| v.kind == ResKind::Exceptional).map(|v| v.multiplicity).collect(),
        d: lcm_d(&g),
        mu,
        mu_resolution: mu_from_resolution(&g, c.r()),
        r: c.r(),
        minimal: g.is_minimal(),
    };
    let mut out = Vec::new();
    write(cfg, "resolution.json", &to_json(&g), &mut out)?;
    write(cfg, "resolution.dot", &g.to_dot(), &mut out)?;
    write(cfg, "resolve.json", &to_json(&report), &mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemistableReport {
    pub d: u64,
    pub components: usize,
    pub edges: usize,
    pub total_genus: u64,
    pub betti1: i64,
    pub h1: H1Report,
}

pub fn cmd_semistable(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let c = read_curve(cfg)?;
    let g = build_resolution_graph(&c).map_err(|e| CliError::Contract(e.to_string()))?;
    let cf = semistable_reduce(&g).map_err(|e| CliError::Contract(e.to_string()))?;
    let mu = milnor_from_branch_data(&c).map_err(|e| CliError::Contract(e.to_string()))?;
    let report = SemistableReport {
        d: cf.d,
        components: cf.graph.vertices.len(),
        edges: cf.graph.edges.len(),
        total_genus: cf.graph.total_genus(),
        betti1: cf.graph.betti1(),
        h1: verify_h1_dimension(&cf, mu, c.r()),
    };
    let mut out = Vec::new();
    write(cfg, "central_fiber.json", &to_json(&cf), &mut out)?;
    if cfg.dot {
        write(cfg, "central_fiber.dot", &cf.graph.to_dot(), &mut out)?;
    }
    write(cfg, "semistable.json", &to_json(&report), &mut out)?;
    Ok(out)
}

/// The two weight-2 counts, when they disagree.
fn gr2_flag(mhs: &MhsSummary) -> Option<String> {
    let w2 = mhs.gr_dims.2 as i64;
    (w2 != mhs.gr2_alt).then(|| {
        format!(
            "Gr2 discrepancy: #edges - #compact components gives {w2}, first Betti number gives {}",
            mhs.gr2_alt
        )
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HodgeReport {
    pub mhs: MhsSummary,
    pub ops: NilpotentOps,
    pub flags: Vec<String>,
}

pub fn cmd_hodge(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let c = read_curve(cfg)?;
    let p = run_pipeline(&c)?;
    let report = HodgeReport { flags: gr2_flag(&p.mhs).into_iter().collect(), mhs: p.mhs, ops: p.ops };
    let mut out = Vec::new();
    if cfg.dot {
        write(cfg, "central_fiber.dot", &p.central_fiber.graph.to_dot(), &mut out)?;
    }
    write(cfg, "hodge.json", &to_json(&report), &mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub s: u32,
    /// Entry `k` is the summary at level `k + 1`.
    pub levels: Vec<InvariantSummary>,
    pub constant: Vec<bool>,
    pub flags: Vec<String>,
}

pub fn cmd_invariant(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let c = read_curve(cfg)?;
    let p = run_pipeline(&c)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let levels: Vec<InvariantSummary> =
        pool.install(|| (1..=cfg.s).into_par_iter().map(|s| assemble_invariant(&c, s)).collect::<Result<_, _>>())?;
    let report = InvariantReport {
        s: cfg.s,
        constant: levels.iter().map(|l| l.constant).collect(),
        levels,
        flags: gr2_flag(&p.mhs).into_iter().collect(),
    };
    let mut out = Vec::new();
    write(cfg, "invariant.json", &to_json(&report), &mut out)?;
    Ok(out)
}

/// Scenario file for `bar-demo`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarScenario {
    #[serde(default = "default_symbols")]
    pub symbols: Vec<String>,
    /// The residue `ρ`, as a Scalar over `symbols`.
    #[serde(default = "default_rho")]
    pub rho: String,
    #[serde(default = "default_d")]
    pub d: u64,
    #[serde(default = "default_mk")]
    pub mk: u64,
}

fn default_symbols() -> Vec<String> {
    vec!["rho".into()]
}

fn default_rho() -> String {
    "rho".into()
}

fn default_d() -> u64 {
    156
}

fn default_mk() -> u64 {
    24
}

impl Default for BarScenario {
    fn default() -> Self {
        BarScenario { symbols: default_symbols(), rho: default_rho(), d: default_d(), mk: default_mk() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BarReport {
    pub rho: Scalar,
    #[serde(flatten)]
    pub report: OmegaReport,
    pub verdict: String,
    pub flags: Vec<String>,
}

pub fn cmd_bar_demo(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let sc: BarScenario = match &cfg.scenario {
        Some(p) => read_structured(p)?,
        None => BarScenario::default(),
    };
    if sc.d == 0 || sc.mk == 0 {
        return Err(CliError::Parse("d and mk must be positive".into()));
    }
    let alpha = Alphabet::new(&sc.symbols).map_err(|e| CliError::Parse(e.to_string()))?;
    let rho = alpha.parse(&sc.rho).map_err(|e| CliError::Parse(e.to_string()))?;
    let chain = OmegaScenario::with_rho(rho.clone()).map_err(|e| CliError::Contract(e.to_string()))?;
    let report = scenario_omega(&chain, sc.d, sc.mk).map_err(|e| CliError::Contract(e.to_string()))?;
    let verdict = if rho.is_zero() {
        "degenerate input"
    } else if report.l_nonzero {
        "nonzero: the nilpotent orbit is not constant"
    } else {
        "zero"
    };
    let flags = if report.printed_matches { Vec::new() } else { vec![report.note.clone()] };
    let report = BarReport { rho, report, verdict: verdict.into(), flags };
    let mut out = Vec::new();
    write(cfg, "bar_demo.json", &to_json(&report), &mut out)?;
    Ok(out)
}

pub fn cmd_integrate_demo(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let sc: NumericScenario = match &cfg.scenario {
        Some(p) => read_structured(p)?,
        None => NumericScenario::node(),
    };
    let run = || run_numeric(&sc, &cfg.epsilon_grid, DEFAULT_TOLERANCE);
    let report: NumericReport = match cfg.jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(j).build().map_err(|e| CliError::Usage(e.to_string()))?;
            pool.install(run)
        }
        None => run(),
    }
    .map_err(|e| CliError::Contract(e.to_string()))?;
    let mut out = Vec::new();
    write(cfg, "integrate_demo.json", &to_json(&report), &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags() {
        let cli = Cli::try_parse_from(["nearby", "integrate-demo", "--epsilon-grid", "1e-2,1e-3", "--jobs", "3"]).unwrap();
        let cfg = RunConfig::from(cli);
        assert_eq!(cfg.command, Command::IntegrateDemo);
        assert_eq!(cfg.epsilon_grid, vec![1e-2, 1e-3]);
        assert_eq!(cfg.jobs, Some(3));
        assert_eq!(cfg.s, 2);
        let cfg = RunConfig::from(Cli::try_parse_from(["nearby", "hodge"]).unwrap());
        assert_eq!(cfg.epsilon_grid, DEFAULT_GRID.to_vec());
        assert!(Cli::try_parse_from(["nearby", "frobnicate"]).is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::new(Command::Invariant, ".");
        cfg.s = 0;
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
        cfg.s = 1;
        cfg.input = Some("/nonexistent/curve.json".into());
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
        let mut cfg = RunConfig::new(Command::IntegrateDemo, ".");
        cfg.epsilon_grid = vec![0.1];
        assert!(cfg.validate().is_err());
        assert!(matches!(run(&RunConfig::new(Command::Resolve, ".")), Err(CliError::Usage(_))));
    }

    #[test]
    fn bar_scenario_defaults() {
        let sc: BarScenario = serde_json::from_str("{}").unwrap();
        assert_eq!(sc, BarScenario::default());
        assert!(serde_json::from_str::<BarScenario>(r#"{"rh":"0"}"#).is_err());
    }
}
