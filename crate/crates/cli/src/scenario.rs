//! Scenario files: the JSON schema and its validation into resolved domain
//! objects.
//!
//! Rationals are `"num/den"` strings end to end; weights entered as "1/3"
//! stay exact. Validation errors name the offending field.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use cournot_core::{
    empirical_cclass, trivial_cclass, typicality_cclass, union_lift, BigRational, CClass,
    ExperimentModel, LeveledEvent, ProbabilityMeasure, SampleSpace, Threshold,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario at `{field}`: {reason}")]
    Validation { field: String, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl ToString) -> ScenarioError {
    ScenarioError::Validation {
        field: field.into(),
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub space: Vec<String>,
    #[serde(default)]
    pub measures: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub experiments: BTreeMap<String, ExperimentJson>,
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: String,
    #[serde(default)]
    pub format: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ExperimentJson {
    Iid {
        dist: BTreeMap<String, String>,
        seed: u64,
    },
    Markov {
        init: BTreeMap<String, String>,
        trans: Vec<Vec<String>>,
        seed: u64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventJson {
    pub level: u32,
    pub tuples: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClassSpecJson {
    Trivial {
        #[serde(default)]
        opaque: bool,
    },
    Typicality {
        measure: String,
        delta: String,
        #[serde(default)]
        opaque: bool,
    },
    Empirical {
        experiment: String,
        #[serde(default)]
        trials: Option<usize>,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default)]
        opaque: bool,
    },
    UnionLift {
        of: Vec<ClassSpecJson>,
        #[serde(default)]
        opaque: bool,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum EvalModeJson {
    Named(String),
    Auto { auto: u64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "task", rename_all = "lowercase", deny_unknown_fields)]
pub enum TaskSpec {
    Axioms {
        #[serde(default)]
        name: Option<String>,
        class: ClassSpecJson,
        levels: Vec<u32>,
        #[serde(default)]
        max_membership_calls: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Cmeasure {
        #[serde(default)]
        name: Option<String>,
        class: ClassSpecJson,
        #[serde(default)]
        events: Vec<EventJson>,
        #[serde(default)]
        default_probes: bool,
        #[serde(default)]
        random_probes: Option<usize>,
        #[serde(default)]
        tol: Option<f64>,
        #[serde(default)]
        horizon: Option<u64>,
    },
    Theorem1 {
        #[serde(default)]
        name: Option<String>,
        measure: String,
        delta: String,
        class: ClassSpecJson,
        #[serde(default)]
        events: Vec<EventJson>,
        #[serde(default)]
        default_probes: bool,
        #[serde(default)]
        tol: Option<f64>,
        #[serde(default)]
        horizon: Option<u64>,
    },
    Govern {
        #[serde(default)]
        name: Option<String>,
        measure: String,
        experiment: String,
        delta_grid: Vec<String>,
        levels: Vec<u32>,
        #[serde(default)]
        event_budget: Option<usize>,
        #[serde(default)]
        trials: Option<usize>,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        alpha: Option<f64>,
    },
    Ambiguity {
        #[serde(default)]
        name: Option<String>,
        measure1: String,
        measure2: String,
        delta: String,
        #[serde(default)]
        k_cap: Option<u64>,
        #[serde(default)]
        exact_verify_cap: Option<u64>,
    },
    Profile {
        #[serde(default)]
        name: Option<String>,
        p: String,
        sigma: String,
        k_max: u64,
        side: String,
        #[serde(default)]
        mode: Option<EvalModeJson>,
    },
}

impl TaskSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::Axioms { .. } => "axioms",
            TaskSpec::Cmeasure { .. } => "cmeasure",
            TaskSpec::Theorem1 { .. } => "theorem1",
            TaskSpec::Govern { .. } => "govern",
            TaskSpec::Ambiguity { .. } => "ambiguity",
            TaskSpec::Profile { .. } => "profile",
        }
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            TaskSpec::Axioms { name, .. }
            | TaskSpec::Cmeasure { name, .. }
            | TaskSpec::Theorem1 { name, .. }
            | TaskSpec::Govern { name, .. }
            | TaskSpec::Ambiguity { name, .. }
            | TaskSpec::Profile { name, .. } => name.as_deref(),
        }
    }
}

/// A parsed and validated scenario: every name resolved, every rational
/// exact.
pub struct Scenario {
    pub space: SampleSpace,
    pub measures: BTreeMap<String, ProbabilityMeasure>,
    pub experiments: BTreeMap<String, ExperimentModel>,
    pub tasks: Vec<TaskSpec>,
    pub output_dir: Option<String>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    validate_scenario(file)
}

fn parse_rational_field(field: &str, value: &str) -> Result<BigRational, ScenarioError> {
    cournot_core::rational::parse_rational(value).map_err(|e| invalid(field, e))
}

fn weights_in_label_order(
    field: &str,
    space: &SampleSpace,
    map: &BTreeMap<String, String>,
) -> Result<Vec<BigRational>, ScenarioError> {
    for label in map.keys() {
        if space.index_of(label).is_none() {
            return Err(invalid(
                format!("{field}.{label}"),
                "unknown outcome label",
            ));
        }
    }
    space
        .labels()
        .iter()
        .map(|label| {
            let value = map
                .get(label)
                .ok_or_else(|| invalid(format!("{field}.{label}"), "missing weight"))?;
            parse_rational_field(&format!("{field}.{label}"), value)
        })
        .collect()
}

fn validate_scenario(file: ScenarioFile) -> Result<Scenario, ScenarioError> {
    let space = SampleSpace::new(file.space.clone()).map_err(|e| invalid("space", e))?;

    let mut measures = BTreeMap::new();
    for (name, map) in &file.measures {
        let field = format!("measures.{name}");
        let weights = weights_in_label_order(&field, &space, map)?;
        let measure =
            ProbabilityMeasure::new(&space, weights).map_err(|e| invalid(&field, e))?;
        measures.insert(name.clone(), measure);
    }

    let mut experiments = BTreeMap::new();
    for (name, spec) in &file.experiments {
        let field = format!("experiments.{name}");
        let model = match spec {
            ExperimentJson::Iid { dist, seed } => {
                let weights = weights_in_label_order(&format!("{field}.dist"), &space, dist)?;
                let measure = ProbabilityMeasure::new(&space, weights)
                    .map_err(|e| invalid(format!("{field}.dist"), e))?;
                ExperimentModel::iid(measure, *seed)
            }
            ExperimentJson::Markov { init, trans, seed } => {
                let init = weights_in_label_order(&format!("{field}.init"), &space, init)?;
                let mut rows = Vec::new();
                for (i, row) in trans.iter().enumerate() {
                    if row.len() != space.size() {
                        return Err(invalid(
                            format!("{field}.trans[{i}]"),
                            format!("expected {} entries", space.size()),
                        ));
                    }
                    let row = row
                        .iter()
                        .enumerate()
                        .map(|(j, v)| parse_rational_field(&format!("{field}.trans[{i}][{j}]"), v))
                        .collect::<Result<Vec<_>, _>>()?;
                    rows.push(row);
                }
                ExperimentModel::markov(&space, init, rows, *seed)
                    .map_err(|e| invalid(&field, e))?
            }
        };
        experiments.insert(name.clone(), model);
    }

    let scenario = Scenario {
        output_dir: file.output.as_ref().map(|o| o.dir.clone()),
        space,
        measures,
        experiments,
        tasks: file.tasks,
    };
    for (index, task) in scenario.tasks.iter().enumerate() {
        validate_task(&scenario, index, task)?;
    }
    Ok(scenario)
}

fn validate_task(
    scenario: &Scenario,
    index: usize,
    task: &TaskSpec,
) -> Result<(), ScenarioError> {
    let field = format!("tasks[{index}]");
    let check_measure = |name: &str, sub: &str| -> Result<(), ScenarioError> {
        if scenario.measures.contains_key(name) {
            Ok(())
        } else {
            Err(invalid(
                format!("{field}.{sub}"),
                format!("unknown measure {name:?}"),
            ))
        }
    };
    let check_experiment = |name: &str, sub: &str| -> Result<(), ScenarioError> {
        if scenario.experiments.contains_key(name) {
            Ok(())
        } else {
            Err(invalid(
                format!("{field}.{sub}"),
                format!("unknown experiment {name:?}"),
            ))
        }
    };
    match task {
        TaskSpec::Axioms { class, levels, .. } => {
            validate_class(scenario, &format!("{field}.class"), class)?;
            if levels.is_empty() {
                return Err(invalid(format!("{field}.levels"), "empty"));
            }
        }
        TaskSpec::Cmeasure {
            class,
            events,
            default_probes,
            random_probes,
            ..
        } => {
            validate_class(scenario, &format!("{field}.class"), class)?;
            validate_events(scenario, &field, events)?;
            if events.is_empty() && !default_probes && random_probes.unwrap_or(0) == 0 {
                return Err(invalid(&field, "no probe events requested"));
            }
        }
        TaskSpec::Theorem1 {
            measure,
            delta,
            class,
            events,
            ..
        } => {
            check_measure(measure, "measure")?;
            parse_threshold(&format!("{field}.delta"), delta)?;
            validate_class(scenario, &format!("{field}.class"), class)?;
            validate_events(scenario, &field, events)?;
        }
        TaskSpec::Govern {
            measure,
            experiment,
            delta_grid,
            levels,
            ..
        } => {
            check_measure(measure, "measure")?;
            check_experiment(experiment, "experiment")?;
            if delta_grid.is_empty() {
                return Err(invalid(format!("{field}.delta_grid"), "empty"));
            }
            for (i, d) in delta_grid.iter().enumerate() {
                parse_threshold(&format!("{field}.delta_grid[{i}]"), d)?;
            }
            if levels.is_empty() {
                return Err(invalid(format!("{field}.levels"), "empty"));
            }
        }
        TaskSpec::Ambiguity {
            measure1, measure2, delta, ..
        } => {
            check_measure(measure1, "measure1")?;
            check_measure(measure2, "measure2")?;
            parse_threshold(&format!("{field}.delta"), delta)?;
        }
        TaskSpec::Profile { p, sigma, side, k_max, mode, .. } => {
            parse_rational_field(&format!("{field}.p"), p)?;
            parse_rational_field(&format!("{field}.sigma"), sigma)?;
            if side != "upper" && side != "lower" {
                return Err(invalid(
                    format!("{field}.side"),
                    "expected \"upper\" or \"lower\"",
                ));
            }
            if *k_max == 0 {
                return Err(invalid(format!("{field}.k_max"), "must be at least 1"));
            }
            if let Some(EvalModeJson::Named(name)) = mode {
                if name != "exact" && name != "float" {
                    return Err(invalid(
                        format!("{field}.mode"),
                        "expected \"exact\", \"float\" or {\"auto\": k}",
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Builds the class purely for validation, re-anchoring error fields at the
/// task's path.
fn validate_class(
    scenario: &Scenario,
    field: &str,
    spec: &ClassSpecJson,
) -> Result<(), ScenarioError> {
    build_class(scenario, spec).map(|_| ()).map_err(|e| match e {
        ScenarioError::Validation {
            field: inner,
            reason,
        } => {
            let suffix = inner.strip_prefix("class").unwrap_or(inner.as_str());
            invalid(format!("{field}{suffix}"), reason)
        }
        other => other,
    })
}

fn validate_events(
    scenario: &Scenario,
    field: &str,
    events: &[EventJson],
) -> Result<(), ScenarioError> {
    for (i, e) in events.iter().enumerate() {
        build_event(&scenario.space, e)
            .map_err(|err| invalid(format!("{field}.events[{i}]"), err))?;
    }
    Ok(())
}

pub fn parse_threshold(field: &str, value: &str) -> Result<Threshold, ScenarioError> {
    let r = parse_rational_field(field, value)?;
    Threshold::new(r).map_err(|e| invalid(field, e))
}

pub fn build_event(
    space: &SampleSpace,
    spec: &EventJson,
) -> Result<LeveledEvent, cournot_core::CournotError> {
    LeveledEvent::from_labels(space, spec.level, &spec.tuples)
}

/// Resolves a class spec against the scenario's named measures and
/// experiments.
pub fn build_class(scenario: &Scenario, spec: &ClassSpecJson) -> Result<CClass, ScenarioError> {
    let class = match spec {
        ClassSpecJson::Trivial { opaque } => {
            let c = trivial_cclass(&scenario.space);
            wrap(c, *opaque)
        }
        ClassSpecJson::Typicality {
            measure,
            delta,
            opaque,
        } => {
            let m = scenario
                .measures
                .get(measure)
                .ok_or_else(|| invalid("class.measure", format!("unknown measure {measure:?}")))?;
            let d = parse_threshold("class.delta", delta)?;
            wrap(typicality_cclass(m, &d), *opaque)
        }
        ClassSpecJson::Empirical {
            experiment,
            trials,
            epsilon,
            alpha,
            opaque,
        } => {
            let e = scenario.experiments.get(experiment).ok_or_else(|| {
                invalid(
                    "class.experiment",
                    format!("unknown experiment {experiment:?}"),
                )
            })?;
            let c = empirical_cclass(
                e.clone(),
                trials.unwrap_or(10_000),
                epsilon.unwrap_or(0.02),
                alpha.unwrap_or(0.01),
            )
            .map_err(|err| invalid("class", err))?;
            wrap(c, *opaque)
        }
        ClassSpecJson::UnionLift { of, opaque } => {
            if of.len() < 2 {
                return Err(invalid("class.of", "union-lift needs at least two classes"));
            }
            let mut built = build_class(scenario, &of[0])?;
            for part in &of[1..] {
                let next = build_class(scenario, part)?;
                built = union_lift(&built, &next).map_err(|e| invalid("class.of", e))?;
            }
            wrap(built, *opaque)
        }
    };
    Ok(class)
}

fn wrap(class: CClass, opaque: bool) -> CClass {
    if opaque {
        class.black_box()
    } else {
        class
    }
}
