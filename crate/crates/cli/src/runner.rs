//! Task execution and report emission.
//!
//! Reports are deterministic by construction: sorted maps, stable orderings,
//! no timestamps. Two runs of the same scenario with the same seeds produce
//! byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use cournot_core::{
    bernoulli_limit_profile, c_measure, check_axioms, default_probe_events, governs,
    probabilistic_ambiguity_witness, verify_theorem1, AxiomCheckBudget, AxiomReport,
    CMeasureOptions, EvalMode, GovernanceParams, LeveledEvent, ProfileSide, WitnessSearchParams,
};

use crate::scenario::{
    build_class, build_event, parse_threshold, EvalModeJson, Scenario, ScenarioError, TaskSpec,
};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub fail_fast: bool,
    pub seed_override: Option<u64>,
    pub tol_override: Option<f64>,
    pub horizon_override: Option<u64>,
    pub parallel: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            out_dir: None,
            fail_fast: false,
            seed_override: None,
            tol_override: None,
            horizon_override: None,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Ok,
    Violation,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskOutcome {
    pub index: usize,
    pub task: String,
    pub name: Option<String>,
    pub status: TaskStatus,
    pub files: Vec<String>,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub tasks: Vec<TaskOutcome>,
    pub exit_code: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

/// Executes every task in order and writes one report file per task plus a
/// final `summary.json`. The exit code is 0 when every task is clean, 2
/// when any task reports a violation or fails at runtime.
pub fn run_scenario(
    scenario: &Scenario,
    scenario_name: &str,
    options: &RunOptions,
) -> Result<RunSummary, RunError> {
    let out_dir = options
        .out_dir
        .clone()
        .or_else(|| scenario.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("reports"));
    fs::create_dir_all(&out_dir)?;

    let scenario = apply_seed_override(scenario, options);

    let mut outcomes = Vec::new();
    for (index, task) in scenario.tasks.iter().enumerate() {
        let outcome = run_task(&scenario, index, task, &out_dir, options)?;
        let stop = options.fail_fast && outcome.status != TaskStatus::Ok;
        outcomes.push(outcome);
        if stop {
            break;
        }
    }

    let exit_code = if outcomes.iter().all(|o| o.status == TaskStatus::Ok) {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    };
    let summary = RunSummary {
        scenario: scenario_name.to_string(),
        tasks: outcomes,
        exit_code,
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

fn apply_seed_override(scenario: &Scenario, options: &RunOptions) -> Scenario {
    let mut experiments = scenario.experiments.clone();
    if let Some(seed) = options.seed_override {
        for model in experiments.values_mut() {
            *model = model.reseeded(seed);
        }
    }
    Scenario {
        space: scenario.space.clone(),
        measures: scenario.measures.clone(),
        experiments,
        tasks: scenario.tasks.clone(),
        output_dir: scenario.output_dir.clone(),
    }
}

fn cmeasure_options(
    tol: Option<f64>,
    horizon: Option<u64>,
    options: &RunOptions,
) -> CMeasureOptions {
    let defaults = CMeasureOptions::default();
    CMeasureOptions {
        tolerance: options.tol_override.or(tol).unwrap_or(defaults.tolerance),
        horizon: options
            .horizon_override
            .or(horizon)
            .unwrap_or(defaults.horizon),
        verify_monotone: defaults.verify_monotone,
    }
}

fn probe_events(
    scenario: &Scenario,
    events: &[crate::scenario::EventJson],
    default_probes: bool,
    random_probes: usize,
) -> Result<Vec<LeveledEvent>, ScenarioError> {
    let mut probes = Vec::new();
    if default_probes || random_probes > 0 {
        let all = default_probe_events(&scenario.space, 0x9e3779b9, random_probes)
            .map_err(|e| ScenarioError::Validation {
                field: "probes".into(),
                reason: e.to_string(),
            })?;
        if default_probes {
            probes.extend(all);
        } else {
            // only the random tail
            let base = default_probe_events(&scenario.space, 0x9e3779b9, 0)
                .map_err(|e| ScenarioError::Validation {
                    field: "probes".into(),
                    reason: e.to_string(),
                })?
                .len();
            probes.extend(all.into_iter().skip(base));
        }
    }
    for e in events {
        probes.push(build_event(&scenario.space, e).map_err(|err| {
            ScenarioError::Validation {
                field: "events".into(),
                reason: err.to_string(),
            }
        })?);
    }
    Ok(probes)
}

fn run_task(
    scenario: &Scenario,
    index: usize,
    task: &TaskSpec,
    out_dir: &Path,
    options: &RunOptions,
) -> Result<TaskOutcome, RunError> {
    let kind = task.kind();
    let base_name = format!("{index:02}-{kind}");
    let mut files = Vec::new();
    let mut detail = None;

    let status = (|| -> Result<TaskStatus, String> {
        match task {
            TaskSpec::Axioms {
                class,
                levels,
                max_membership_calls,
                seed,
                ..
            } => {
                let class = build_class(scenario, class).map_err(|e| e.to_string())?;
                let defaults = AxiomCheckBudget::default();
                let budget = AxiomCheckBudget {
                    max_membership_calls: max_membership_calls
                        .unwrap_or(defaults.max_membership_calls),
                    seed: seed.unwrap_or(defaults.seed),
                    ..defaults
                };
                let mut reports: Vec<AxiomReport> = Vec::new();
                for &level in levels {
                    reports.push(
                        check_axioms(&class, level, &budget).map_err(|e| e.to_string())?,
                    );
                }
                let all_pass = reports.iter().all(|r| r.all_pass());
                let report = serde_json::json!({
                    "task": "axioms",
                    "class_kind": class.kind(),
                    "support_note": class.support_note(),
                    "levels": reports,
                    "all_pass": all_pass,
                });
                write_json(&out_dir.join(format!("{base_name}.json")), &report)
                    .map_err(|e| e.to_string())?;
                files.push(format!("{base_name}.json"));
                Ok(if all_pass {
                    TaskStatus::Ok
                } else {
                    TaskStatus::Violation
                })
            }
            TaskSpec::Cmeasure {
                class,
                events,
                default_probes,
                random_probes,
                tol,
                horizon,
                ..
            } => {
                let class = build_class(scenario, class).map_err(|e| e.to_string())?;
                let probes = probe_events(
                    scenario,
                    events,
                    *default_probes,
                    random_probes.unwrap_or(0),
                )
                .map_err(|e| e.to_string())?;
                let opts = cmeasure_options(*tol, *horizon, options);
                let mut rows = Vec::new();
                for event in &probes {
                    let estimate =
                        c_measure(&class, event, &opts).map_err(|e| e.to_string())?;
                    rows.push(serde_json::json!({
                        "event": event,
                        "estimate": estimate,
                    }));
                }
                let report = serde_json::json!({
                    "task": "cmeasure",
                    "class_kind": class.kind(),
                    "support_note": class.support_note(),
                    "tolerance": opts.tolerance,
                    "horizon": opts.horizon,
                    "probes": rows,
                });
                write_json(&out_dir.join(format!("{base_name}.json")), &report)
                    .map_err(|e| e.to_string())?;
                files.push(format!("{base_name}.json"));
                Ok(TaskStatus::Ok)
            }
            TaskSpec::Theorem1 {
                measure,
                delta,
                class,
                events,
                default_probes,
                tol,
                horizon,
                ..
            } => {
                let m = &scenario.measures[measure];
                let d = parse_threshold("delta", delta).map_err(|e| e.to_string())?;
                let class = build_class(scenario, class).map_err(|e| e.to_string())?;
                let mut probes =
                    probe_events(scenario, events, *default_probes, 0).map_err(|e| e.to_string())?;
                if probes.is_empty() {
                    probes = default_probe_events(&scenario.space, 0x9e3779b9, 4)
                        .map_err(|e| e.to_string())?;
                }
                let opts = cmeasure_options(*tol, *horizon, options);
                let report =
                    verify_theorem1(m, &d, &class, &probes, &opts).map_err(|e| e.to_string())?;
                write_json(&out_dir.join(format!("{base_name}.json")), &report)
                    .map_err(|e| e.to_string())?;
                files.push(format!("{base_name}.json"));
                Ok(if report.consistent {
                    TaskStatus::Ok
                } else {
                    TaskStatus::Violation
                })
            }
            TaskSpec::Govern {
                measure,
                experiment,
                delta_grid,
                levels,
                event_budget,
                trials,
                epsilon,
                alpha,
                ..
            } => {
                let m = &scenario.measures[measure];
                let e = &scenario.experiments[experiment];
                let defaults = GovernanceParams::default();
                let grid = delta_grid
                    .iter()
                    .enumerate()
                    .map(|(i, d)| parse_threshold(&format!("delta_grid[{i}]"), d))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|err| err.to_string())?;
                let params = GovernanceParams {
                    delta_grid: grid,
                    levels: levels.clone(),
                    event_budget: event_budget.unwrap_or(defaults.event_budget),
                    trials: trials.unwrap_or(defaults.trials),
                    epsilon: epsilon.unwrap_or(defaults.epsilon),
                    alpha: alpha.unwrap_or(defaults.alpha),
                    parallel: options.parallel,
                };
                let report = governs(m, e, &params).map_err(|err| err.to_string())?;
                write_json(&out_dir.join(format!("{base_name}.json")), &report)
                    .map_err(|err| err.to_string())?;
                files.push(format!("{base_name}.json"));
                Ok(if report.governs() {
                    TaskStatus::Ok
                } else {
                    TaskStatus::Violation
                })
            }
            TaskSpec::Ambiguity {
                measure1,
                measure2,
                delta,
                k_cap,
                exact_verify_cap,
                ..
            } => {
                let p1 = &scenario.measures[measure1];
                let p2 = &scenario.measures[measure2];
                let d = parse_threshold("delta", delta).map_err(|e| e.to_string())?;
                let defaults = WitnessSearchParams::default();
                let search = WitnessSearchParams {
                    k_cap: k_cap.unwrap_or(defaults.k_cap),
                    exact_verify_cap: exact_verify_cap.unwrap_or(defaults.exact_verify_cap),
                };
                let witness = probabilistic_ambiguity_witness(p1, p2, &d, &search)
                    .map_err(|e| e.to_string())?;
                write_json(&out_dir.join(format!("{base_name}.json")), &witness)
                    .map_err(|e| e.to_string())?;
                files.push(format!("{base_name}.json"));
                Ok(TaskStatus::Ok)
            }
            TaskSpec::Profile {
                p,
                sigma,
                k_max,
                side,
                mode,
                ..
            } => {
                let p = cournot_core::rational::parse_rational(p).map_err(|e| e.to_string())?;
                let sigma =
                    cournot_core::rational::parse_rational(sigma).map_err(|e| e.to_string())?;
                let side_enum = if side == "upper" {
                    ProfileSide::Upper
                } else {
                    ProfileSide::Lower
                };
                let mode = match mode {
                    None => EvalMode::default(),
                    Some(EvalModeJson::Named(name)) if name == "exact" => EvalMode::Exact,
                    Some(EvalModeJson::Named(_)) => EvalMode::LogSpace,
                    Some(EvalModeJson::Auto { auto }) => EvalMode::Auto { switchover: *auto },
                };
                let points = bernoulli_limit_profile(&p, &sigma, *k_max, side_enum, mode)
                    .map_err(|e| e.to_string())?;
                let csv_name = format!("{base_name}.csv");
                let mut writer = csv::Writer::from_path(out_dir.join(&csv_name))
                    .map_err(|e| e.to_string())?;
                writer
                    .write_record(["k", "probability", "side"])
                    .map_err(|e| e.to_string())?;
                for point in &points {
                    writer
                        .write_record([
                            point.k.to_string(),
                            format!("{:.17}", point.probability.to_f64()),
                            side.clone(),
                        ])
                        .map_err(|e| e.to_string())?;
                }
                writer.flush().map_err(|e| e.to_string())?;
                files.push(csv_name);
                Ok(TaskStatus::Ok)
            }
        }
    })();

    let status = match status {
        Ok(s) => s,
        Err(message) => {
            detail = Some(message);
            TaskStatus::Error
        }
    };
    Ok(TaskOutcome {
        index,
        task: kind.to_string(),
        name: task.name().map(|s| s.to_string()),
        status,
        files,
        detail,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)
}
