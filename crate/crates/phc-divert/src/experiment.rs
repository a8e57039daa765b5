//! Scenario orchestration: replications, cross-scenario comparisons, and
//! report files.
//!
//! One [`ScenarioConfig`] describes a whole experiment: both facilities,
//! the routing policy set, the replication plan, and where the reports go.
//! [`run_experiment`] executes every requested scenario under common random
//! numbers and writes four kinds of files into the output directory:
//!
//! * `patients_<scenario>.csv`, one row per patient per replication,
//! * `decisions_<scenario>.csv`, one row per routing decision,
//! * `summary.csv`, one row per scenario with every outcome statistic,
//! * `comparison.md`, the scenario-by-outcome table,
//!
//! plus `effective_config.toml`, the fully materialized configuration that
//! reproduces the run. Everything is staged in a scratch directory and
//! renamed into place at the end, so a failed run never leaves partial
//! outputs behind.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diversion::Mode;
use crate::kernel::MINUTES_PER_DAY;
use crate::metrics::{
    alpha, mape, occupancy, sample_mean, summarize_scenario, OutcomeReport, RepScalars, Summary,
};
use crate::model::{
    run_scenario, ConfigError, LabourRelease, Patient, PhcConfig, RunTrace, SimParams,
};
use crate::predictors::Predictor;

/// Anything that can stop an experiment.
#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("configuration rejected:\n{message}")]
    Config { message: String },
    #[error(transparent)]
    Model(#[from] ConfigError),
    #[error("sweep rejected: {0}")]
    Sweep(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

fn config_err(message: impl fmt::Display) -> ExperimentError {
    ExperimentError::Config {
        message: message.to_string(),
    }
}

/// Which routing scenarios to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicyChoice {
    /// The full set: none, actual, rst_state, rst_steady, est.
    All,
    One(Mode),
}

impl PolicyChoice {
    #[must_use]
    pub fn modes(self) -> Vec<Mode> {
        match self {
            PolicyChoice::All => Mode::ALL.to_vec(),
            PolicyChoice::One(m) => vec![m],
        }
    }
}

impl FromStr for PolicyChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            Ok(PolicyChoice::All)
        } else {
            Mode::from_str(s).map(PolicyChoice::One)
        }
    }
}

impl fmt::Display for PolicyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyChoice::All => f.write_str("all"),
            PolicyChoice::One(m) => f.write_str(m.name()),
        }
    }
}

impl TryFrom<String> for PolicyChoice {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PolicyChoice> for String {
    fn from(p: PolicyChoice) -> String {
        p.to_string()
    }
}

/// A whole experiment, as read from a config file. Every field has a
/// default, so the minimal config is an empty file (or just a seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Scenario set to run.
    pub policy: PolicyChoice,
    /// One-way travel time between the facilities, minutes.
    pub travel_time: f64,
    /// A labour-bed wait counts against alpha when it exceeds this many
    /// minutes.
    pub wait_threshold: f64,
    pub seed: u64,
    pub replications: u32,
    /// Days discarded before statistics start.
    pub warmup_days: f64,
    /// Days measured after the warm-up. Must exceed the warm-up length: a
    /// run that measures less than it discards is almost always a mistake.
    pub horizon_days: f64,
    /// Optional home-wait floor below which diversion is never considered.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_home_wait_gate: Option<f64>,
    /// When the labour bed frees: at service completion (default) or only
    /// once the inpatient bed is granted (blocking).
    pub labour_release: LabourRelease,
    pub phc1: PhcConfig,
    pub phc2: PhcConfig,
    /// Report directory; replaced wholesale on success.
    pub out_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            policy: PolicyChoice::All,
            travel_time: 60.0,
            wait_threshold: 120.0,
            seed: 42,
            replications: 10,
            warmup_days: 180.0,
            horizon_days: 365.0,
            min_home_wait_gate: None,
            labour_release: LabourRelease::default(),
            phc1: PhcConfig::phc1(),
            phc2: PhcConfig::phc2(),
            out_dir: PathBuf::from("results"),
        }
    }
}

impl ScenarioConfig {
    /// Simulation parameters for one scenario and replication.
    #[must_use]
    pub fn params_for(&self, mode: Mode, replication: u64) -> SimParams {
        SimParams {
            phc: [self.phc1.clone(), self.phc2.clone()],
            mode,
            travel_time: self.travel_time,
            min_home_wait_gate: self.min_home_wait_gate,
            labour_release: self.labour_release,
            warmup_minutes: self.warmup_days * MINUTES_PER_DAY,
            horizon_minutes: self.horizon_days * MINUTES_PER_DAY,
            master_seed: self.seed,
            replication,
            record_doctor_grants: false,
        }
    }

    /// Collects every problem: scenario-level bounds plus both facilities
    /// and policy usability for each requested mode.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let mut issues = BTreeSet::new();
        if self.replications < 1 {
            issues.insert("replications: at least one required".to_string());
        }
        if !(self.warmup_days >= 0.0 && self.warmup_days.is_finite()) {
            issues.insert(format!(
                "warmup_days: must be non-negative and finite, got {}",
                self.warmup_days
            ));
        }
        if !(self.horizon_days > self.warmup_days && self.horizon_days.is_finite()) {
            issues.insert(format!(
                "horizon_days: must exceed warmup_days ({}), got {}",
                self.warmup_days, self.horizon_days
            ));
        }
        if self.wait_threshold <= 0.0 {
            issues.insert(format!(
                "wait_threshold: must be positive, got {}",
                self.wait_threshold
            ));
        }
        for mode in self.policy.modes() {
            if let Err(e) = self.params_for(mode, 0).validate() {
                for issue in e.issues {
                    issues.insert(issue);
                }
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(config_err(
                issues.into_iter().collect::<Vec<_>>().join("\n"),
            ))
        }
    }
}

/// Reads a config file; TOML unless the extension says `.json`. Missing
/// keys take their defaults, including inside the facility tables, so a
/// partial file overrides only what it names. Unknown keys are rejected.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ExperimentError> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if json {
        parse_json_config(&text)
    } else {
        parse_toml_config(&text)
    }
}

/// Parses TOML config text with default overlay semantics.
pub fn parse_toml_config(text: &str) -> Result<ScenarioConfig, ExperimentError> {
    let user: toml::Table = toml::from_str(text).map_err(config_err)?;
    let mut base = toml::Table::try_from(ScenarioConfig::default())
        .expect("default config serializes to a table");
    merge_toml(&mut base, user);
    ScenarioConfig::deserialize(base).map_err(config_err)
}

/// Parses JSON config text with default overlay semantics.
pub fn parse_json_config(text: &str) -> Result<ScenarioConfig, ExperimentError> {
    let user: serde_json::Value = serde_json::from_str(text).map_err(config_err)?;
    let serde_json::Value::Object(user) = user else {
        return Err(config_err("top level must be an object"));
    };
    let serde_json::Value::Object(mut base) =
        serde_json::to_value(ScenarioConfig::default()).expect("default config serializes")
    else {
        unreachable!("a struct serializes to an object")
    };
    merge_json(&mut base, user);
    serde_json::from_value(serde_json::Value::Object(base)).map_err(config_err)
}

/// The fully materialized configuration. Parsing it back yields the same
/// config: defaults are already spelled out, so the overlay is a no-op.
#[must_use]
pub fn effective_toml(cfg: &ScenarioConfig) -> String {
    toml::to_string_pretty(cfg).expect("config serializes to TOML")
}

fn merge_toml(dst: &mut toml::Table, src: toml::Table) {
    for (k, v) in src {
        match (dst.get_mut(&k), v) {
            (Some(toml::Value::Table(d)), toml::Value::Table(s)) => merge_toml(d, s),
            (_, v) => {
                dst.insert(k, v);
            }
        }
    }
}

fn merge_json(
    dst: &mut serde_json::Map<String, serde_json::Value>,
    src: serde_json::Map<String, serde_json::Value>,
) {
    for (k, v) in src {
        match (dst.get_mut(&k), v) {
            (Some(serde_json::Value::Object(d)), serde_json::Value::Object(s)) => {
                merge_json(d, s)
            }
            (_, v) => {
                dst.insert(k, v);
            }
        }
    }
}

// ----- trace reduction ------------------------------------------------------

/// Reduces one finished replication to its scalar outcomes.
#[must_use]
pub fn reduce_trace(trace: &RunTrace, wait_threshold: f64) -> RepScalars {
    let measured = trace.end_minutes - trace.warmup_minutes;
    let mut s = RepScalars::default();
    for f in 0..2 {
        let t = &trace.facility[f];
        s.doctor_occ[f] = occupancy(t.doctor_busy_open_minutes, t.n_doctors, t.opd_open_minutes)
            .expect("positive OPD measure");
        s.staff_nurse_occ[f] = occupancy(t.staff_nurse_busy_minutes, t.n_staff_nurses, measured)
            .expect("positive horizon");
        s.labour_occ[f] = occupancy(t.labour_busy_minutes, t.n_labour_beds, measured)
            .expect("positive horizon");
        s.ipd_occ[f] = t
            .ipd_capacity
            .map(|cap| occupancy(t.ipd_busy_minutes, cap, measured).expect("positive horizon"));
    }

    let mut waits: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut pairs: Vec<(&Patient, f64)> = Vec::new();
    for p in trace.measured_childbirth() {
        if let Some(w) = p.realized_wait_excl_travel() {
            waits[p.served].push(w);
            pairs.push((p, w));
            s.served_childbirth += 1;
        }
        if p.diverted {
            s.diverted += 1;
        }
    }
    let pooled: Vec<f64> = waits[0].iter().chain(&waits[1]).copied().collect();
    s.alpha_pooled = alpha(&pooled, wait_threshold).expect("threshold validated");
    s.mean_wait_pooled = sample_mean(&pooled);
    for (f, w) in waits.iter().enumerate() {
        s.alpha_by_facility[f] = alpha(w, wait_threshold).expect("threshold validated");
        s.mean_wait_by_facility[f] = sample_mean(w);
    }

    for predictor in Predictor::ALL {
        let prediction = |p: &Patient| match predictor {
            Predictor::Actual => p.pred_actual,
            Predictor::RstState => p.pred_rst_state,
            Predictor::RstSteady => p.pred_rst_steady,
            Predictor::Est => p.pred_est,
        };
        let obs: Vec<(f64, f64)> = pairs
            .iter()
            .filter_map(|(p, w)| Some((*w, prediction(p)?)))
            .collect();
        if let Some(m) = mape(&obs) {
            s.mape.insert(predictor.name(), m);
        }
    }
    s
}

// ----- sweeps ---------------------------------------------------------------

/// A parameter the sensitivity sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Mean childbirth interarrival at the first facility, minutes.
    IaChildbirth,
    /// One-way travel time, minutes.
    TravelTime,
}

impl SweepParam {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::IaChildbirth => "ia_childbirth",
            SweepParam::TravelTime => "travel_time",
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ia_childbirth" => Ok(SweepParam::IaChildbirth),
            "travel_time" => Ok(SweepParam::TravelTime),
            other => Err(format!(
                "unknown sweep parameter {other:?}; expected ia_childbirth or travel_time"
            )),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sweep request: the parameter and its value grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepSpec {
    fn apply(&self, cfg: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut c = cfg.clone();
        match self.param {
            SweepParam::IaChildbirth => c.phc1.ia_childbirth = Some(value),
            SweepParam::TravelTime => c.travel_time = value,
        }
        c
    }
}

/// Parses `param=v1,v2,...` as passed to `--sweep`.
impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (param, values) = s
            .split_once('=')
            .ok_or_else(|| format!("expected param=v1,v2,..., got {s:?}"))?;
        let param: SweepParam = param.trim().parse()?;
        let values: Vec<f64> = values
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad sweep value {v:?}: {e}"))
            })
            .collect::<Result<_, _>>()?;
        if values.is_empty() {
            return Err("empty sweep grid".into());
        }
        Ok(SweepSpec { param, values })
    }
}

// ----- execution ------------------------------------------------------------

/// One summary line: a scenario, optionally pinned to a sweep grid point.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub scenario: Mode,
    pub sweep: Option<(SweepParam, f64)>,
    pub report: OutcomeReport,
}

/// What an experiment produced, beyond the files on disk.
#[derive(Debug)]
pub struct ExperimentOutput {
    pub out_dir: PathBuf,
    /// Published files, in writing order.
    pub files: Vec<PathBuf>,
    pub rows: Vec<SummaryRow>,
}

/// Runs the configured scenario set and writes all report files.
pub fn run_experiment(cfg: &ScenarioConfig) -> Result<ExperimentOutput, ExperimentError> {
    execute(cfg, None)
}

/// Runs the scenario set once per grid value of the swept parameter. The
/// summary gains one row per (scenario, value); per-patient logs are
/// written only by plain [`run_experiment`] runs, decision logs always.
pub fn sensitivity_sweep(
    cfg: &ScenarioConfig,
    sweep: &SweepSpec,
) -> Result<ExperimentOutput, ExperimentError> {
    if sweep.values.is_empty() {
        return Err(ExperimentError::Sweep("empty sweep grid".into()));
    }
    for &v in &sweep.values {
        let zero_ok = sweep.param == SweepParam::TravelTime;
        if !(v.is_finite() && (v > 0.0 || (v == 0.0 && zero_ok))) {
            return Err(ExperimentError::Sweep(format!(
                "{} = {v} is not a usable value",
                sweep.param
            )));
        }
    }
    execute(cfg, Some(sweep))
}

fn execute(
    cfg: &ScenarioConfig,
    sweep: Option<&SweepSpec>,
) -> Result<ExperimentOutput, ExperimentError> {
    cfg.validate()?;
    let grid: Vec<Option<f64>> = match sweep {
        None => vec![None],
        Some(s) => s.values.iter().copied().map(Some).collect(),
    };
    // Validate the whole grid before writing anything.
    for point in grid.iter().flatten() {
        let varied = sweep.expect("grid points imply a sweep").apply(cfg, *point);
        varied.validate()?;
    }

    let staging = staging_dir(&cfg.out_dir)?;
    let result = execute_into(cfg, sweep, &grid, &staging);
    match result {
        Ok(mut out) => {
            publish(&staging, &cfg.out_dir)?;
            out.files = out
                .files
                .iter()
                .map(|f| cfg.out_dir.join(f.file_name().expect("staged files have names")))
                .collect();
            Ok(out)
        }
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            Err(e)
        }
    }
}

fn execute_into(
    cfg: &ScenarioConfig,
    sweep: Option<&SweepSpec>,
    grid: &[Option<f64>],
    staging: &Path,
) -> Result<ExperimentOutput, ExperimentError> {
    let modes = cfg.policy.modes();
    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut files: Vec<PathBuf> = Vec::new();

    for &point in grid {
        let varied = match (sweep, point) {
            (Some(s), Some(v)) => s.apply(cfg, v),
            _ => cfg.clone(),
        };
        for &mode in &modes {
            let traces: Vec<RunTrace> = (0..u64::from(varied.replications))
                .into_par_iter()
                .map(|rep| run_scenario(varied.params_for(mode, rep)))
                .collect::<Result<_, _>>()?;

            let suffix = match (sweep, point) {
                (Some(s), Some(v)) => format!("{}_{}_{v}", mode.name(), s.param),
                _ => mode.name().to_string(),
            };
            if point.is_none() {
                let path = staging.join(format!("patients_{suffix}.csv"));
                fs::write(&path, patients_csv(&traces))?;
                files.push(path);
            }
            let path = staging.join(format!("decisions_{suffix}.csv"));
            fs::write(&path, decisions_csv(&traces, varied.travel_time))?;
            files.push(path);

            let scalars: Vec<RepScalars> = traces
                .iter()
                .map(|t| reduce_trace(t, varied.wait_threshold))
                .collect();
            rows.push(SummaryRow {
                scenario: mode,
                sweep: match (sweep, point) {
                    (Some(s), Some(v)) => Some((s.param, v)),
                    _ => None,
                },
                report: summarize_scenario(mode, &scalars),
            });
        }
    }

    let path = staging.join("summary.csv");
    fs::write(&path, summary_csv(&rows))?;
    files.push(path);

    if sweep.is_none() {
        let path = staging.join("comparison.md");
        fs::write(&path, comparison_md(cfg, &rows))?;
        files.push(path);
    }

    let path = staging.join("effective_config.toml");
    fs::write(&path, effective_toml(cfg))?;
    files.push(path);

    Ok(ExperimentOutput {
        out_dir: cfg.out_dir.clone(),
        files,
        rows,
    })
}

fn staging_dir(out_dir: &Path) -> Result<PathBuf, ExperimentError> {
    let name = out_dir
        .file_name()
        .ok_or_else(|| config_err("out_dir must name a directory"))?;
    let mut staged = name.to_os_string();
    staged.push(".staging");
    let staging = out_dir.with_file_name(staged);
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir_all(&staging)?;
    Ok(staging)
}

fn publish(staging: &Path, out_dir: &Path) -> Result<(), ExperimentError> {
    if out_dir.exists() {
        fs::remove_dir_all(out_dir)?;
    }
    fs::rename(staging, out_dir)?;
    Ok(())
}

// ----- report writers ---------------------------------------------------------

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn patients_csv(traces: &[RunTrace]) -> String {
    let mut out = String::from(
        "rep,patient_id,class,origin_phc,served_phc,diverted,created_at,\
         labour_queue_join_at,labour_admit_at,exit_at,realized_wait,\
         realized_wait_excl_travel,prediction_at_decision_home,\
         prediction_at_decision_remote\n",
    );
    for trace in traces {
        for p in &trace.patients {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                trace.replication,
                p.id,
                p.class.name(),
                p.origin + 1,
                p.served + 1,
                p.diverted,
                p.created_at,
                opt(p.labour_queue_join_at),
                opt(p.labour_admit_at),
                opt(p.exit_at),
                opt(p.realized_wait()),
                opt(p.realized_wait_excl_travel()),
                opt(p.w_home),
                opt(p.w_remote_projected),
            )
            .expect("writing to a String cannot fail");
        }
    }
    out
}

fn decisions_csv(traces: &[RunTrace], travel_time: f64) -> String {
    let mut out = String::from(
        "rep,patient_id,issued_at,origin_phc,destination_phc,w_home,\
         w_remote_projected,travel_time,diverted\n",
    );
    for trace in traces {
        for d in &trace.decisions {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                trace.replication,
                d.patient_id,
                d.issued_at,
                d.origin + 1,
                d.destination + 1,
                d.w_home,
                d.w_remote_projected,
                travel_time,
                d.diverted,
            )
            .expect("writing to a String cannot fail");
        }
    }
    out
}

fn summary_cells(s: Option<Summary>) -> String {
    match s {
        Some(s) => format!("{},{}", s.mean, opt(s.half_width)),
        None => String::from(","),
    }
}

fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("scenario,replications,sweep_param,sweep_value");
    for col in [
        "alpha",
        "mean_labour_wait",
        "served_childbirth",
        "diverted",
    ] {
        write!(out, ",{col},{col}_hw").expect("string write");
    }
    out.push_str(",delta_rho_doctor,delta_rho_staff_nurse,delta_rho_ipd,delta_rho_labour");
    for p in Predictor::ALL {
        write!(out, ",mape_{0},mape_{0}_hw", p.name()).expect("string write");
    }
    for f in 1..=2 {
        for col in [
            "doctor_occ",
            "staff_nurse_occ",
            "ipd_occ",
            "labour_occ",
            "alpha",
            "mean_labour_wait",
        ] {
            write!(out, ",phc{f}_{col},phc{f}_{col}_hw").expect("string write");
        }
    }
    out.push('\n');

    for row in rows {
        let r = &row.report;
        let (sweep_param, sweep_value) = match row.sweep {
            Some((p, v)) => (p.name().to_string(), v.to_string()),
            None => (String::new(), String::new()),
        };
        write!(
            out,
            "{},{},{},{}",
            row.scenario.name(),
            r.replications,
            sweep_param,
            sweep_value
        )
        .expect("string write");
        for s in [
            r.alpha,
            r.mean_labour_wait,
            Some(r.served_childbirth),
            Some(r.diverted),
        ] {
            write!(out, ",{}", summary_cells(s)).expect("string write");
        }
        write!(
            out,
            ",{},{},{},{}",
            r.delta_rho_doc,
            r.delta_rho_nurse,
            opt(r.delta_rho_ipd),
            r.delta_rho_lb
        )
        .expect("string write");
        for p in Predictor::ALL {
            write!(out, ",{}", summary_cells(r.mape.get(p.name()).copied()))
                .expect("string write");
        }
        for f in 0..2 {
            let fo = &r.facility[f];
            for s in [
                Some(fo.doctor_occupancy),
                Some(fo.staff_nurse_occupancy),
                fo.ipd_bed_occupancy,
                Some(fo.labour_bed_occupancy),
                fo.alpha,
                fo.mean_labour_wait,
            ] {
                write!(out, ",{}", summary_cells(s)).expect("string write");
            }
        }
        out.push('\n');
    }
    out
}

fn fmt_summary(s: Option<Summary>, scale: f64) -> String {
    match s {
        None => String::from("-"),
        Some(s) => match s.half_width {
            Some(hw) => format!("{:.2} ± {:.2}", s.mean * scale, hw * scale),
            None => format!("{:.2}", s.mean * scale),
        },
    }
}

fn comparison_md(cfg: &ScenarioConfig, rows: &[SummaryRow]) -> String {
    let mut out = String::from("# Scenario comparison\n\n");
    writeln!(
        out,
        "{} replications of {} measured days after a {}-day warm-up; \
         wait threshold {} min; travel time {} min; seed {}.\n",
        cfg.replications,
        cfg.horizon_days,
        cfg.warmup_days,
        cfg.wait_threshold,
        cfg.travel_time,
        cfg.seed
    )
    .expect("string write");

    out.push_str("| outcome |");
    for row in rows {
        write!(out, " {} |", row.scenario.name()).expect("string write");
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(rows.len()));
    out.push('\n');

    let mut line = |label: &str, cell: &dyn Fn(&SummaryRow) -> String| {
        write!(out, "| {label} |").expect("string write");
        for row in rows {
            write!(out, " {} |", cell(row)).expect("string write");
        }
        out.push('\n');
    };

    line(
        &format!("waits beyond {} min, alpha (%)", cfg.wait_threshold),
        &|r| fmt_summary(r.report.alpha, 100.0),
    );
    line("mean labour-bed wait (min)", &|r| {
        fmt_summary(r.report.mean_labour_wait, 1.0)
    });
    line("childbirth patients served", &|r| {
        fmt_summary(Some(r.report.served_childbirth), 1.0)
    });
    line("diverted", &|r| fmt_summary(Some(r.report.diverted), 1.0));
    line("load imbalance, doctors (%)", &|r| {
        format!("{:.2}", r.report.delta_rho_doc)
    });
    line("load imbalance, staff nurses (%)", &|r| {
        format!("{:.2}", r.report.delta_rho_nurse)
    });
    line("load imbalance, inpatient beds (%)", &|r| {
        r.report
            .delta_rho_ipd
            .map_or_else(|| String::from("-"), |v| format!("{v:.2}"))
    });
    line("load imbalance, labour beds (%)", &|r| {
        format!("{:.2}", r.report.delta_rho_lb)
    });
    for p in Predictor::ALL {
        let label = format!("MAPE {} (%)", p.name());
        line(&label, &|r| {
            fmt_summary(r.report.mape.get(p.name()).copied(), 1.0)
        });
    }
    for f in 0..2 {
        let label = format!("labour-bed occupancy, phc{} (%)", f + 1);
        line(&label, &|r| {
            fmt_summary(Some(r.report.facility[f].labour_bed_occupancy), 100.0)
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(dir: &Path) -> ScenarioConfig {
        ScenarioConfig {
            replications: 2,
            warmup_days: 0.0,
            horizon_days: 20.0,
            out_dir: dir.join("results"),
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn empty_config_is_the_default_experiment() {
        let cfg = parse_toml_config("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        let cfg = parse_json_config("{}").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
    }

    #[test]
    fn partial_tables_override_only_what_they_name() {
        let cfg = parse_toml_config(
            "seed = 7\n\
             [phc2]\n\
             p_lab = 0.4\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.phc2.p_lab, 0.4);
        // The rest of phc2 keeps its own defaults, not phc1's.
        assert_eq!(cfg.phc2.ia_childbirth, Some(720.0));
        assert_eq!(cfg.phc1, PhcConfig::phc1());
    }

    #[test]
    fn json_configs_parse_with_the_same_overlay() {
        let cfg = parse_json_config(
            r#"{"policy": "est", "phc1": {"ia_childbirth": 960.0}}"#,
        )
        .unwrap();
        assert_eq!(cfg.policy, PolicyChoice::One(Mode::Est));
        assert_eq!(cfg.phc1.ia_childbirth, Some(960.0));
        assert_eq!(cfg.phc1.n_ipd_beds, 6);
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let err = parse_toml_config("sed = 7\n").unwrap_err();
        assert!(err.to_string().contains("sed"), "{err}");
        let err = parse_toml_config("[phc1]\nia_chldbirth = 100\n").unwrap_err();
        assert!(err.to_string().contains("ia_chldbirth"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_a_line_diagnostic() {
        let err = parse_toml_config("policy = \n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    // Loading then re-emitting the effective configuration is idempotent
    // for anything a file can express. (Disabling an arrival source is the
    // one programmatic-only setting: an absent key means "default".)
    #[test]
    fn effective_config_round_trips() {
        let cfg = parse_toml_config(
            "policy = \"rst-steady\"\n\
             min_home_wait_gate = 30.0\n\
             [phc1]\n\
             ia_childbirth = 960.0\n",
        )
        .unwrap();
        let emitted = effective_toml(&cfg);
        let reparsed = parse_toml_config(&emitted).unwrap();
        assert_eq!(reparsed, cfg);
        assert_eq!(effective_toml(&reparsed), emitted);
    }

    #[test]
    fn validation_reports_every_problem_with_field_paths() {
        let mut cfg = ScenarioConfig::default();
        cfg.replications = 0;
        cfg.wait_threshold = 0.0;
        cfg.horizon_days = 10.0; // below the 180-day warm-up
        cfg.phc1.n_doctors = 0;
        let err = cfg.validate().unwrap_err().to_string();
        for needle in ["replications", "wait_threshold", "horizon_days", "phc1.n_doctors"] {
            assert!(err.contains(needle), "missing {needle} in {err}");
        }
    }

    #[test]
    fn sweep_specs_parse_and_reject_garbage() {
        let s: SweepSpec = "ia_childbirth=1440,720".parse().unwrap();
        assert_eq!(s.param, SweepParam::IaChildbirth);
        assert_eq!(s.values, vec![1440.0, 720.0]);
        let s: SweepSpec = "travel_time = 0, 30, 60".parse().unwrap();
        assert_eq!(s.param, SweepParam::TravelTime);
        assert_eq!(s.values, vec![0.0, 30.0, 60.0]);
        assert!("ia_childbirth".parse::<SweepSpec>().is_err());
        assert!("beds=1,2".parse::<SweepSpec>().is_err());
        assert!("travel_time=fast".parse::<SweepSpec>().is_err());
    }

    #[test]
    fn reduced_scalars_are_sane_fractions() {
        let trace = run_scenario(ScenarioConfig::default().params_for(Mode::None, 0)).unwrap();
        let s = reduce_trace(&trace, 120.0);
        for f in 0..2 {
            assert!((0.0..=1.0).contains(&s.doctor_occ[f]));
            assert!((0.0..=1.0).contains(&s.labour_occ[f]));
            let a = s.alpha_by_facility[f].unwrap();
            assert!((0.0..=1.0).contains(&a));
        }
        assert!(s.served_childbirth > 500);
        assert_eq!(s.mape["actual"], 0.0);
        assert!(s.mape["est"] > 0.0);
    }

    #[test]
    fn experiment_writes_the_advertised_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_config(dir.path());
        cfg.policy = PolicyChoice::One(Mode::Est);
        let out = run_experiment(&cfg).unwrap();
        let names: Vec<String> = out
            .files
            .iter()
            .map(|f| f.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            [
                "patients_est.csv",
                "decisions_est.csv",
                "summary.csv",
                "comparison.md",
                "effective_config.toml"
            ]
        );
        for f in &out.files {
            assert!(f.exists(), "{} missing", f.display());
        }
        assert!(!dir.path().join("results.staging").exists());
        // The effective config reloads to the run's own configuration.
        let reloaded = load_config(&out.out_dir.join("effective_config.toml")).unwrap();
        assert_eq!(reloaded, cfg);
    }

    #[test]
    fn reruns_are_byte_identical_and_share_random_numbers_across_scenarios() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_config(dir.path());
        cfg.policy = PolicyChoice::All;
        run_experiment(&cfg).unwrap();
        let read = |name: &str| fs::read_to_string(cfg.out_dir.join(name)).unwrap();
        let first: Vec<String> = ["patients_none.csv", "patients_est.csv", "summary.csv"]
            .iter()
            .map(|n| read(n))
            .collect();
        run_experiment(&cfg).unwrap();
        let second: Vec<String> = ["patients_none.csv", "patients_est.csv", "summary.csv"]
            .iter()
            .map(|n| read(n))
            .collect();
        assert_eq!(first, second, "identical config+seed must reproduce bytes");

        // Common random numbers: the arrival column matches row for row
        // across scenario logs.
        let arrivals = |csv: &str| -> Vec<String> {
            csv.lines()
                .skip(1)
                .map(|l| l.split(',').nth(6).unwrap().to_string())
                .collect()
        };
        assert_eq!(arrivals(&first[0]), arrivals(&first[1]));
    }

    #[test]
    fn every_childbirth_patient_logs_exactly_once_per_scenario() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_config(dir.path());
        cfg.policy = PolicyChoice::One(Mode::Actual);
        run_experiment(&cfg).unwrap();
        let csv = fs::read_to_string(cfg.out_dir.join("patients_actual.csv")).unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut childbirth = 0;
        for line in csv.lines().skip(1) {
            let mut cells = line.split(',');
            let rep = cells.next().unwrap().to_string();
            let id = cells.next().unwrap().to_string();
            assert!(seen.insert((rep, id)), "duplicate row: {line}");
            if line.split(',').nth(2).unwrap() == "childbirth" {
                childbirth += 1;
            }
        }
        assert!(childbirth > 50);
    }

    #[test]
    fn single_replication_reports_without_half_widths() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_config(dir.path());
        cfg.replications = 1;
        cfg.policy = PolicyChoice::One(Mode::None);
        let out = run_experiment(&cfg).unwrap();
        let report = &out.rows[0].report;
        assert_eq!(report.alpha.unwrap().half_width, None);
        assert_eq!(report.served_childbirth.half_width, None);
    }

    #[test]
    fn sweep_emits_one_summary_row_per_grid_value() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_config(dir.path());
        cfg.policy = PolicyChoice::One(Mode::None);
        let sweep = SweepSpec {
            param: SweepParam::IaChildbirth,
            values: vec![1440.0, 720.0],
        };
        let out = sensitivity_sweep(&cfg, &sweep).unwrap();
        assert_eq!(out.rows.len(), 2);
        assert_eq!(out.rows[0].sweep, Some((SweepParam::IaChildbirth, 1440.0)));
        assert_eq!(out.rows[1].sweep, Some((SweepParam::IaChildbirth, 720.0)));
        let summary = fs::read_to_string(cfg.out_dir.join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 3);
        assert!(summary.lines().nth(2).unwrap().contains("ia_childbirth,720"));
        // Doubling the arrival rate serves roughly twice the patients.
        let served = |i: usize| out.rows[i].report.served_childbirth.mean;
        assert!(served(1) > 1.2 * served(0), "{} vs {}", served(1), served(0));
    }

    #[test]
    fn higher_travel_time_diverts_no_more_patients() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_config(dir.path());
        cfg.horizon_days = 60.0;
        cfg.policy = PolicyChoice::One(Mode::Actual);
        let sweep = SweepSpec {
            param: SweepParam::TravelTime,
            values: vec![0.0, 60.0, 240.0],
        };
        let out = sensitivity_sweep(&cfg, &sweep).unwrap();
        let diverted: Vec<f64> = out.rows.iter().map(|r| r.report.diverted.mean).collect();
        assert!(
            diverted[0] >= diverted[1] && diverted[1] >= diverted[2],
            "diversions should fall with travel time: {diverted:?}"
        );
        assert!(diverted[0] > 0.0);
    }

    #[test]
    fn empty_sweep_grid_is_rejected() {
        let cfg = ScenarioConfig::default();
        let sweep = SweepSpec {
            param: SweepParam::TravelTime,
            values: vec![],
        };
        assert!(matches!(
            sensitivity_sweep(&cfg, &sweep),
            Err(ExperimentError::Sweep(_))
        ));
    }

    #[test]
    fn failed_validation_leaves_no_output_directory() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_config(dir.path());
        cfg.replications = 0;
        assert!(run_experiment(&cfg).is_err());
        assert!(!cfg.out_dir.exists());
        assert!(!dir.path().join("results.staging").exists());
    }
}
