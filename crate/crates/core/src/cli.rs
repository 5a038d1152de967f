//! Config parsing, report assembly and rendering behind the `padic-dyn` binary.
//!
//! Everything here is pure apart from reading the config file, so commands can
//! be driven from tests without spawning a process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::ergodicity::{self, ErgodicityVerdict, LevelResult, Rule, Theory};
use crate::error::Error;
use crate::map::{DynamicsProfile, FixedPointClass, MapParams, Regime, DEFAULT_ORBIT_CAP};
use crate::padic::{format_rational, parse_rational, PadicNumber, Radius};
use crate::radius::{BranchRow, RadiusMapSpec, RadiusResult};
use crate::sampling::rng_from_seed;
use crate::sphere::{self, InvariantRadiusSet, MeasureBranch, MeasureValue};
use crate::verify::{self, RhoFn, SuiteResult, VerifyOptions};

pub const SCHEMA_VERSION: &str = "1.0.0";
pub const TOOL_NAME: &str = "padic-dyn";

/// Largest accepted `max_level`; the residue-modulus cap bites earlier anyway.
const MAX_LEVEL_LIMIT: u32 = 24;
/// Iterates of the radius map shown per analysed radius.
const RADIUS_ITERATES: usize = 3;

// ---------------------------------------------------------------- config

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub map: MapBlock,
    #[serde(default)]
    pub radii: RadiiSpec,
    #[serde(default = "default_max_level")]
    pub max_level: u32,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_max_level() -> u32 {
    ergodicity::DEFAULT_MAX_LEVEL
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapBlock {
    pub p: u64,
    pub a: RationalText,
    pub b: RationalText,
    pub c: RationalText,
}

/// A rational given either as a JSON integer or as a `"num/den"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Int(i64),
    Text(String),
}

impl RationalText {
    fn to_rational(&self) -> Result<BigRational, Error> {
        match self {
            RationalText::Int(n) => Ok(BigRational::from_integer((*n).into())),
            RationalText::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AutoTag {
    #[default]
    #[serde(rename = "auto")]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiiSpec {
    Auto(AutoTag),
    List(Vec<i64>),
}

impl Default for RadiiSpec {
    fn default() -> Self {
        RadiiSpec::Auto(AutoTag::Auto)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_orbit_steps")]
    pub orbit_steps: usize,
}

fn default_points() -> usize {
    50
}

fn default_orbit_steps() -> usize {
    20
}

impl Default for Samples {
    fn default() -> Self {
        Self { points: default_points(), orbit_steps: default_orbit_steps() }
    }
}

/// Parses a config with field paths and line/column positions in errors.
pub fn parse_config(text: &str) -> Result<AnalysisConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("invalid config at `{path}`: {}", e.inner()))
    })
}

/// A config after validation: map built, radii resolved, seed fixed.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub params: MapParams,
    pub profile: DynamicsProfile,
    pub radii: Vec<i64>,
    pub max_level: u32,
    pub samples: Samples,
    pub seed: u64,
    pub orbit_cap: usize,
}

impl ResolvedConfig {
    /// The config that reproduces this run, with every default spelled out.
    pub fn echo(&self) -> AnalysisConfig {
        let text = |x: &PadicNumber| RationalText::Text(format_rational(x.value()));
        AnalysisConfig {
            map: MapBlock {
                p: self.params.prime() as u64,
                a: text(&self.params.a()),
                b: text(&self.params.b()),
                c: text(&self.params.c()),
            },
            radii: RadiiSpec::List(self.radii.clone()),
            max_level: self.max_level,
            samples: self.samples,
            seed: Some(self.seed),
        }
    }

    fn verify_options(&self, rho: RhoFn) -> VerifyOptions {
        VerifyOptions {
            seed: self.seed,
            points: self.samples.points,
            orbit_steps: self.samples.orbit_steps,
            max_level: self.max_level,
            radii: self.radii.clone(),
            rho,
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_level: Option<u32>,
    pub orbit_cap: Option<usize>,
}

pub fn resolve(config: &AnalysisConfig, overrides: Overrides, format: OutputFormat) -> Result<ResolvedConfig, CliError> {
    let cfg_err = |e: Error| CliError::Config(e.to_string());
    let m = &config.map;
    let params = MapParams::from_rationals(
        m.p,
        m.a.to_rational().map_err(cfg_err)?,
        m.b.to_rational().map_err(cfg_err)?,
        m.c.to_rational().map_err(cfg_err)?,
    )
    .map_err(cfg_err)?;
    let profile = params.profile();
    let set = profile.invariant_radii();
    let radii = match &config.radii {
        RadiiSpec::Auto(_) => set.auto_radii(),
        RadiiSpec::List(list) => {
            if list.is_empty() {
                return Err(CliError::Config("radii list is empty".into()));
            }
            if let Some(bad) = list.iter().find(|&&l| !set.contains(l)) {
                return Err(CliError::Config(format!(
                    "radius exponent {bad} is not invariant (invariant exponents: {})",
                    set.describe()
                )));
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            sorted.dedup();
            sorted
        }
    };
    let max_level = overrides.max_level.unwrap_or(config.max_level);
    if !(2..=MAX_LEVEL_LIMIT).contains(&max_level) {
        return Err(CliError::Config(format!("max_level must lie in 2..={MAX_LEVEL_LIMIT}, got {max_level}")));
    }
    if config.samples.points == 0 {
        return Err(CliError::Config("samples.points must be positive".into()));
    }
    let orbit_cap = overrides.orbit_cap.unwrap_or(DEFAULT_ORBIT_CAP);
    if config.samples.orbit_steps > orbit_cap {
        return Err(CliError::Config(format!(
            "samples.orbit_steps = {} exceeds the orbit cap {orbit_cap}",
            config.samples.orbit_steps
        )));
    }
    let seed = match (overrides.seed.or(config.seed), format) {
        (Some(s), _) => s,
        (None, OutputFormat::Text) => 0,
        (None, OutputFormat::Json) => {
            return Err(CliError::Config("a seed is required for JSON output (config `seed` or --seed)".into()))
        }
    };
    Ok(ResolvedConfig { params, profile, radii, max_level, samples: config.samples, seed, orbit_cap })
}

// ---------------------------------------------------------------- commands

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Orbit { start: String, steps: usize },
    Ergodicity,
    Verify,
}

#[derive(Debug, Clone)]
pub struct Request {
    pub command: Command,
    pub config: PathBuf,
    pub format: OutputFormat,
    pub overrides: Overrides,
    /// ρ table used by the verification suites.
    pub rho: RhoFn,
}

impl Request {
    pub fn new(command: Command, config: impl Into<PathBuf>, format: OutputFormat) -> Self {
        Self { command, config: config.into(), format, overrides: Overrides::default(), rho: sphere::rho }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("analysis error: {0}")]
    Analysis(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) | CliError::Analysis(_) => 1,
        }
    }
}

/// Rendered output plus whether any check disagreed with theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub disagreement: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.disagreement {
            3
        } else {
            0
        }
    }
}

pub fn load_config(path: &Path) -> Result<AnalysisConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn execute(req: &Request) -> Result<Outcome, CliError> {
    let config = load_config(&req.config)?;
    execute_config(&config, req)
}

pub fn execute_config(config: &AnalysisConfig, req: &Request) -> Result<Outcome, CliError> {
    let cfg = resolve(config, req.overrides, req.format)?;
    match &req.command {
        Command::Analyze => {
            let report = analyze(&cfg, req.rho)?;
            let disagreement = report.disagreement;
            Ok(Outcome { output: render(&report, req.format, render_analysis_text), disagreement })
        }
        Command::Orbit { start, steps } => {
            let report = orbit(&cfg, start, *steps)?;
            Ok(Outcome { output: render(&report, req.format, render_orbit_text), disagreement: false })
        }
        Command::Ergodicity => {
            let report = ergodicity_report(&cfg)?;
            let disagreement = report.disagreement;
            Ok(Outcome { output: render(&report, req.format, render_ergodicity_text), disagreement })
        }
        Command::Verify => {
            let report = verify_report(&cfg, req.rho)?;
            let disagreement = !report.passed;
            Ok(Outcome { output: render(&report, req.format, render_verify_text), disagreement })
        }
    }
}

fn render<T: Serialize>(report: &T, format: OutputFormat, text: fn(&T) -> String) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        OutputFormat::Text => text(report),
    }
}

fn analysis_err(e: Error) -> CliError {
    match e {
        Error::OrbitTooLong { .. } | Error::NotInvariantRadius { .. } => CliError::Config(e.to_string()),
        other => CliError::Analysis(other.to_string()),
    }
}

// ---------------------------------------------------------------- report types

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

fn tool() -> ToolInfo {
    ToolInfo { name: TOOL_NAME, version: env!("CARGO_PKG_VERSION") }
}

/// A radius as its exponent (or "zero") plus `p^l` rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RadiusOut {
    pub exponent: Radius,
    pub rendered: String,
}

impl RadiusOut {
    fn new(r: Radius, p: u32) -> Self {
        Self { exponent: r, rendered: r.render(p) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileBlock {
    pub fixed_point: String,
    pub alpha: RadiusOut,
    pub beta: RadiusOut,
    pub regime: Regime,
    pub lambda: String,
    pub lambda_norm: RadiusOut,
    pub fixed_point_class: FixedPointClass,
}

impl ProfileBlock {
    fn new(profile: &DynamicsProfile) -> Self {
        let p = profile.prime();
        Self {
            fixed_point: profile.fixed_point.to_string(),
            alpha: RadiusOut::new(profile.alpha, p),
            beta: RadiusOut::new(profile.beta, p),
            regime: profile.regime,
            lambda: profile.lambda.to_string(),
            lambda_norm: RadiusOut::new(profile.lambda_norm, p),
            fixed_point_class: profile.fixed_point_class,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantSetBlock {
    #[serde(flatten)]
    pub set: InvariantRadiusSet,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RadiusResultOut {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<RadiusOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<RadiusOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<RadiusOut>,
}

impl RadiusResultOut {
    fn new(r: &RadiusResult, p: u32) -> Self {
        let out = |r: Option<Radius>| r.map(|r| RadiusOut::new(r, p));
        match *r {
            RadiusResult::Determined { radius } => {
                Self { kind: "determined", radius: out(Some(radius)), lower: None, upper: None }
            }
            RadiusResult::Indeterminate { lower, upper } => {
                Self { kind: "indeterminate", radius: None, lower: out(lower), upper: out(upper) }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureOut {
    pub raw: String,
    pub value: String,
    pub branch: MeasureBranch,
}

impl MeasureOut {
    fn new(m: &MeasureValue) -> Self {
        Self { raw: format_rational(&m.raw), value: format_rational(&m.value), branch: m.branch }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessOut {
    pub center: String,
    pub radius: RadiusOut,
    pub measure: MeasureOut,
    pub points_checked: usize,
    pub escapes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictOut {
    pub theoretical: Theory,
    pub rule: Rule,
    pub levels: Vec<LevelResult>,
    pub transitive_all_levels: bool,
    pub witness: Option<WitnessOut>,
    pub disagreement: Option<String>,
}

impl VerdictOut {
    fn new(v: &ErgodicityVerdict, p: u32) -> Self {
        Self {
            theoretical: v.theoretical,
            rule: v.rule,
            levels: v.levels.clone(),
            transitive_all_levels: v.levels.iter().all(|l| l.transitive),
            witness: v.witness.as_ref().map(|w| WitnessOut {
                center: w.center.to_string(),
                radius: RadiusOut::new(w.rho, p),
                measure: MeasureOut::new(&w.measure),
                points_checked: w.points_checked,
                escapes: w.escapes,
            }),
            disagreement: v.disagreement.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RadiusBlock {
    pub exponent: i64,
    pub radius: RadiusOut,
    pub rho: RadiusOut,
    /// The point s = x₀ + p^{-l} the minimal ball is built around.
    pub sample_point: String,
    pub minimal_ball_measure: MeasureOut,
    pub sphere_invariant_on_samples: bool,
    pub radius_iterates: Vec<RadiusResultOut>,
    pub verdict: VerdictOut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: &'static str,
    pub tool: ToolInfo,
    pub config: AnalysisConfig,
    pub profile: ProfileBlock,
    pub radius_map: Vec<BranchRow>,
    pub invariant_set: InvariantSetBlock,
    pub radii: Vec<RadiusBlock>,
    pub checks: Vec<SuiteResult>,
    pub disagreement: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErgodicityEntry {
    pub exponent: i64,
    pub verdict: VerdictOut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErgodicityReport {
    pub schema_version: &'static str,
    pub tool: ToolInfo,
    pub config: AnalysisConfig,
    pub profile: ProfileBlock,
    pub verdicts: Vec<ErgodicityEntry>,
    pub disagreement: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub schema_version: &'static str,
    pub tool: ToolInfo,
    pub config: AnalysisConfig,
    pub checks: Vec<SuiteResult>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitRow {
    pub step: usize,
    /// Exact value; omitted once the exact rational grew too large.
    pub value: Option<String>,
    pub distance: RadiusOut,
    /// Radius-map prediction from the previous distance.
    pub predicted: Option<RadiusResultOut>,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub schema_version: &'static str,
    pub tool: ToolInfo,
    pub config: AnalysisConfig,
    pub start: String,
    pub steps: usize,
    pub fixed_point: String,
    pub rows: Vec<OrbitRow>,
    /// Step at which the orbit reached the pole −c; that row is the last.
    pub pole_step: Option<usize>,
    /// Step at which exact arithmetic handed over to certified digits.
    pub certified_from: Option<usize>,
}

// ---------------------------------------------------------------- builders

pub fn analyze(cfg: &ResolvedConfig, rho: RhoFn) -> Result<AnalysisReport, CliError> {
    let blocks = std::thread::scope(|scope| {
        let handles: Vec<_> =
            cfg.radii.iter().map(|&l| scope.spawn(move || radius_block(cfg, l))).collect();
        handles.into_iter().map(|h| h.join().expect("radius worker panicked")).collect::<Result<Vec<_>, _>>()
    })?;
    let summary = verify::run(&cfg.params, &cfg.verify_options(rho)).map_err(analysis_err)?;
    let set = cfg.profile.invariant_radii();
    let disagreement = !summary.all_passed() || blocks.iter().any(|b| b.verdict.disagreement.is_some());
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        tool: tool(),
        config: cfg.echo(),
        profile: ProfileBlock::new(&cfg.profile),
        radius_map: RadiusMapSpec::of(&cfg.profile).branch_table(),
        invariant_set: InvariantSetBlock { set, description: set.describe() },
        radii: blocks,
        checks: summary.suites,
        disagreement,
    })
}

fn radius_block(cfg: &ResolvedConfig, l: i64) -> Result<RadiusBlock, CliError> {
    let p = cfg.params.prime();
    let rho = sphere::rho(&cfg.profile, &cfg.params, l).map_err(analysis_err)?;
    let v = ergodicity::verdict(&cfg.params, l, cfg.max_level).map_err(analysis_err)?;
    let mut rng = rng_from_seed(cfg.seed ^ (l as u64).rotate_left(32));
    let invariant =
        sphere::sphere_maps_into_itself(&cfg.params, l, &mut rng, cfg.samples.points).map_err(analysis_err)?;
    let iterates = RadiusMapSpec::of(&cfg.profile)
        .iterate(Radius::Power(l), RADIUS_ITERATES)
        .map_err(analysis_err)?;
    let s = cfg.profile.fixed_point.value() + crate::padic::pow_rational(p, -l);
    Ok(RadiusBlock {
        exponent: l,
        radius: RadiusOut::new(Radius::Power(l), p),
        rho: RadiusOut::new(rho, p),
        sample_point: format_rational(&s),
        minimal_ball_measure: MeasureOut::new(&v.minimal_ball_measure),
        sphere_invariant_on_samples: invariant,
        radius_iterates: iterates.iter().map(|r| RadiusResultOut::new(r, p)).collect(),
        verdict: VerdictOut::new(&v, p),
    })
}

pub fn ergodicity_report(cfg: &ResolvedConfig) -> Result<ErgodicityReport, CliError> {
    let p = cfg.params.prime();
    let verdicts = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .radii
            .iter()
            .map(|&l| scope.spawn(move || ergodicity::verdict(&cfg.params, l, cfg.max_level)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("radius worker panicked")).collect::<Result<Vec<_>, _>>()
    })
    .map_err(analysis_err)?;
    let disagreement = verdicts.iter().any(|v| v.disagreement.is_some());
    Ok(ErgodicityReport {
        schema_version: SCHEMA_VERSION,
        tool: tool(),
        config: cfg.echo(),
        profile: ProfileBlock::new(&cfg.profile),
        verdicts: verdicts.iter().map(|v| ErgodicityEntry { exponent: v.exponent, verdict: VerdictOut::new(v, p) }).collect(),
        disagreement,
    })
}

pub fn verify_report(cfg: &ResolvedConfig, rho: RhoFn) -> Result<VerifyReport, CliError> {
    let summary = verify::run(&cfg.params, &cfg.verify_options(rho)).map_err(analysis_err)?;
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        tool: tool(),
        config: cfg.echo(),
        passed: summary.all_passed(),
        checks: summary.suites,
    })
}

pub fn orbit(cfg: &ResolvedConfig, start: &str, steps: usize) -> Result<OrbitReport, CliError> {
    if steps > cfg.orbit_cap {
        return Err(CliError::Config(Error::OrbitTooLong { requested: steps, cap: cfg.orbit_cap }.to_string()));
    }
    let p = cfg.params.prime();
    let x = PadicNumber::parse(start, p as u64).map_err(|e| CliError::Config(e.to_string()))?;
    let x0 = &cfg.profile.fixed_point;
    let spec = RadiusMapSpec::of(&cfg.profile);

    let mut distances: Vec<(Option<String>, Radius)> = Vec::new();
    let mut pole_step = None;
    let mut certified_from = None;
    for item in cfg.params.orbit_iter(&x).map_err(analysis_err)?.take(steps + 1) {
        match item {
            Ok(y) => {
                let d = y.distance(x0).map_err(analysis_err)?;
                distances.push((Some(y.to_string()), d));
            }
            Err(Error::PoleHit { step }) => {
                // The pole itself is a valid point; only its image is undefined.
                let pole = cfg.params.pole();
                distances.push((Some(pole.to_string()), pole.distance(x0).map_err(analysis_err)?));
                pole_step = Some(step);
                break;
            }
            Err(Error::HeightLimit { step }) => {
                certified_from = Some(step);
                break;
            }
            Err(e) => return Err(analysis_err(e)),
        }
    }
    if let Some(from) = certified_from {
        let approx = cfg.params.certified_displacements(&x, steps).map_err(analysis_err)?;
        distances.extend(approx[from..].iter().map(|d| (None, d.norm())));
    }

    let mut rows = Vec::with_capacity(distances.len());
    let mut previous: Option<Radius> = None;
    for (step, (value, d)) in distances.into_iter().enumerate() {
        let predicted = match previous {
            Some(Radius::Power(e)) => Some(spec.step(Radius::Power(e)).map_err(analysis_err)?),
            Some(Radius::Zero) => Some(RadiusResult::Determined { radius: Radius::Zero }),
            None => None,
        };
        rows.push(OrbitRow {
            step,
            value,
            distance: RadiusOut::new(d, p),
            consistent: predicted.is_none_or(|r| r.admits(d)),
            predicted: predicted.map(|r| RadiusResultOut::new(&r, p)),
        });
        previous = Some(d);
    }
    Ok(OrbitReport {
        schema_version: SCHEMA_VERSION,
        tool: tool(),
        config: cfg.echo(),
        start: x.to_string(),
        steps,
        fixed_point: x0.to_string(),
        rows,
        pole_step,
        certified_from,
    })
}

// ---------------------------------------------------------------- text rendering

fn header(out: &mut String, config: &AnalysisConfig, profile: &ProfileBlock) {
    let m = &config.map;
    let show = |r: &RationalText| match r {
        RationalText::Int(n) => n.to_string(),
        RationalText::Text(s) => s.strip_suffix("/1").unwrap_or(s).to_string(),
    };
    let _ = writeln!(out, "{TOOL_NAME} {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "map      f(x) = (x^2 + ({})x + ({}))/(x + ({})) over Q_{}", show(&m.a), show(&m.b), show(&m.c), m.p);
    let _ = writeln!(out, "x0       {}", profile.fixed_point);
    let _ = writeln!(out, "alpha    {}    beta {}    regime {}", profile.alpha.rendered, profile.beta.rendered, profile.regime.as_str());
    let _ = writeln!(
        out,
        "lambda   {} (|lambda| = {}, {})",
        profile.lambda,
        profile.lambda_norm.rendered,
        profile.fixed_point_class.as_str()
    );
}

fn verdict_line(out: &mut String, l: i64, v: &VerdictOut) {
    let _ = writeln!(
        out,
        "  l={l:<4} {:<11} rule {:<16} transitive through level {}: {}",
        match v.theoretical {
            Theory::Ergodic => "ergodic",
            Theory::NotErgodic => "not ergodic",
            Theory::PaperSilent => "no theory",
        },
        v.rule.tag(),
        v.levels.last().map_or(0, |x| x.level),
        if v.transitive_all_levels { "yes" } else { "no" }
    );
    if let Some(w) = &v.witness {
        let _ = writeln!(
            out,
            "         witness ball U_{}({}) measure {} ({} points, {} escapes)",
            w.radius.rendered, w.center, w.measure.value, w.points_checked, w.escapes
        );
    }
    if let Some(d) = &v.disagreement {
        let _ = writeln!(out, "         DISAGREEMENT: {d}");
    }
}

fn checks_table(out: &mut String, checks: &[SuiteResult]) {
    let _ = writeln!(out, "checks");
    for s in checks {
        let status = if s.ok() { "pass" } else { "FAIL" };
        let _ = writeln!(out, "  {:<22} {status}  {}/{}", s.name, s.passed, s.cases);
        for f in &s.failures {
            let _ = writeln!(out, "      {f}");
        }
    }
}

fn render_analysis_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    header(&mut out, &r.config, &r.profile);
    let _ = writeln!(out, "radius map (r = p^l)");
    for row in &r.radius_map {
        let mark = if row.indeterminate { "  (bound only)" } else { "" };
        let _ = writeln!(out, "  {:<16} -> {}{mark}", row.domain, row.image);
    }
    let _ = writeln!(out, "invariant spheres: {}", r.invariant_set.description);
    let _ = writeln!(out, "radii");
    for b in &r.radii {
        let _ = writeln!(
            out,
            "  l={:<4} rho {:<8} minimal ball measure {} ({})",
            b.exponent,
            b.rho.rendered,
            b.minimal_ball_measure.value,
            match b.minimal_ball_measure.branch {
                MeasureBranch::Formula => "formula",
                MeasureBranch::Clamped => "clamped",
            }
        );
    }
    let _ = writeln!(out, "ergodicity");
    for b in &r.radii {
        verdict_line(&mut out, b.exponent, &b.verdict);
    }
    checks_table(&mut out, &r.checks);
    out
}

fn render_ergodicity_text(r: &ErgodicityReport) -> String {
    let mut out = String::new();
    header(&mut out, &r.config, &r.profile);
    let _ = writeln!(out, "ergodicity");
    for e in &r.verdicts {
        verdict_line(&mut out, e.exponent, &e.verdict);
    }
    out
}

fn render_verify_text(r: &VerifyReport) -> String {
    let mut out = String::new();
    checks_table(&mut out, &r.checks);
    let _ = writeln!(out, "{}", if r.passed { "all suites passed" } else { "some suites FAILED" });
    out
}

fn render_orbit_text(r: &OrbitReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "orbit of {} (x0 = {})", r.start, r.fixed_point);
    let _ = writeln!(out, "{:>5}  {:>8}  value", "step", "dist");
    for row in &r.rows {
        let value = row.value.as_deref().unwrap_or("(certified digits only)");
        let flag = if row.consistent { "" } else { "  INCONSISTENT" };
        let _ = writeln!(out, "{:>5}  {:>8}  {value}{flag}", row.step, row.distance.rendered);
    }
    if let Some(step) = r.pole_step {
        let _ = writeln!(out, "pole: iterate {step} equals -c, f is undefined there");
    }
    out
}
