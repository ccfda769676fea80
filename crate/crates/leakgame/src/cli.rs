//! Command implementations behind the `leakgame` binary.
//!
//! Every command produces a [`CommandOutcome`]: a JSON payload for standard
//! output plus an exit code. Codes: 0 success, 1 verification failure,
//! 2 input error, 3 numerical or modeling error. Floats in payloads and
//! emitted files are rounded to 12 significant digits so identical inputs
//! produce identical bytes.

use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{LeakageGame, MixedStrategy};
use crate::oracle;
use crate::solver::{self, SolverConfig};
use crate::{crowds, fixtures};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_NUMERICAL_ERROR: i32 = 3;

/// Environment variable overriding the seed of randomized checks.
pub const SEED_ENV_VAR: &str = "LEAKGAME_SEED";

#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub exit_code: i32,
    /// JSON document for standard output.
    pub payload: Value,
    /// Optional human-readable rendering for standard error.
    pub notes: Option<String>,
}

impl CommandOutcome {
    fn ok(payload: Value) -> Self {
        Self {
            exit_code: EXIT_OK,
            payload: canonical_floats(payload),
            notes: None,
        }
    }

    fn with_notes(mut self, notes: String) -> Self {
        self.notes = Some(notes);
        self
    }

    fn code(mut self, exit_code: i32) -> Self {
        self.exit_code = exit_code;
        self
    }

    fn error(err: Error) -> Self {
        Self {
            exit_code: exit_code_for(&err),
            payload: json!({ "error": err.to_string() }),
            notes: None,
        }
    }
}

/// Maps error classes onto the exit-code taxonomy: malformed input is 2,
/// numerical/modeling failures are 3.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NonFinite(_)
        | Error::LinearProgram(_)
        | Error::SingularSystem
        | Error::NotConvex(_)
        | Error::IsolatedInitiator(_) => EXIT_NUMERICAL_ERROR,
        _ => EXIT_INPUT_ERROR,
    }
}

fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every floating-point number in the document to 12 significant
/// digits; integers pass through untouched.
pub fn canonical_floats(value: Value) -> Value {
    match value {
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                Value::Number(n)
            } else {
                let rounded = round_sig12(n.as_f64().unwrap());
                serde_json::Number::from_f64(rounded)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            }
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonical_floats).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, canonical_floats(v)))
                .collect(),
        ),
        other => other,
    }
}

/// Final textual form of a payload (pretty JSON, sorted keys).
pub fn render_payload(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("payload serializes")
}

fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV_VAR)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(oracle::DEFAULT_SEED)
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    std::fs::write(path, format!("{}\n", render_payload(value)))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Subgradient,
    Lp,
    Both,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub epsilon: Option<f64>,
    pub max_iterations: Option<usize>,
    pub method: SolveMethod,
    pub trace: Option<std::path::PathBuf>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            epsilon: None,
            max_iterations: None,
            method: SolveMethod::Subgradient,
            trace: None,
        }
    }
}

/// `solve <game-file>`: compute the defender's equilibrium strategy.
pub fn cmd_solve(game_path: &Path, options: &SolveOptions) -> CommandOutcome {
    match run_solve(game_path, options) {
        Ok(payload) => CommandOutcome::ok(payload),
        Err(err) => CommandOutcome::error(err),
    }
}

fn run_solve(game_path: &Path, options: &SolveOptions) -> Result<Value> {
    let game = LeakageGame::load(game_path)?;
    let mut config = SolverConfig::default();
    if let Some(eps) = options.epsilon {
        config.epsilon = eps;
    }
    if let Some(iters) = options.max_iterations {
        config.max_iterations = iters;
    }

    let subgradient = |write_trace: bool| -> Result<Value> {
        let (result, trace) = solver::solve_minimax_traced(&game, &config)?;
        if write_trace {
            if let Some(path) = &options.trace {
                let mut csv = String::from("k,f,f_best,step\n");
                for row in &trace.rows {
                    csv.push_str(&format!(
                        "{},{},{},{}\n",
                        row.iteration, row.objective, row.best_objective, row.step_size
                    ));
                }
                std::fs::write(path, csv)?;
            }
        }
        Ok(serde_json::to_value(&result)?)
    };
    let lp = || -> Result<Value> { Ok(serde_json::to_value(solver::solve_lp_bayes(&game)?)?) };

    Ok(match options.method {
        SolveMethod::Subgradient => subgradient(true)?,
        SolveMethod::Lp => lp()?,
        SolveMethod::Both => json!({
            "subgradient": subgradient(true)?,
            "lp": lp()?,
        }),
    })
}

/// `table <game-file>`: pure-strategy utility table as JSON, with an
/// aligned text rendering on standard error.
pub fn cmd_table(game_path: &Path) -> CommandOutcome {
    match run_table(game_path) {
        Ok((payload, rendered)) => CommandOutcome::ok(payload).with_notes(rendered),
        Err(err) => CommandOutcome::error(err),
    }
}

fn run_table(game_path: &Path) -> Result<(Value, String)> {
    let game = LeakageGame::load(game_path)?;
    let table = game.utility_table()?;
    let payload = json!({
        "defender_actions": game.defender_actions(),
        "attacker_actions": game.attacker_actions(),
        "values": table.values,
    });

    let width = game
        .defender_actions()
        .iter()
        .chain(game.attacker_actions())
        .map(|s| s.len())
        .max()
        .unwrap_or(1)
        .max(8);
    let mut text = format!("{:>width$}", "");
    for a in game.attacker_actions() {
        text.push_str(&format!(" {a:>width$}"));
    }
    text.push('\n');
    for (d, row) in game.defender_actions().iter().zip(&table.values) {
        text.push_str(&format!("{d:>width$}"));
        for v in row {
            text.push_str(&format!(" {v:>width$.4}"));
        }
        text.push('\n');
    }
    Ok((payload, text))
}

/// `verify <game-file> --delta <json>`: audit a defender strategy for
/// epsilon-optimality. Exit 0 on pass, 1 on fail.
pub fn cmd_verify(game_path: &Path, delta_json: &str, epsilon: Option<f64>) -> CommandOutcome {
    match run_verify(game_path, delta_json, epsilon) {
        Ok((payload, pass)) => {
            let outcome = CommandOutcome::ok(payload);
            if pass {
                outcome
            } else {
                outcome.code(EXIT_VERIFICATION_FAILED)
            }
        }
        Err(err) => CommandOutcome::error(err),
    }
}

fn run_verify(game_path: &Path, delta_json: &str, epsilon: Option<f64>) -> Result<(Value, bool)> {
    let game = LeakageGame::load(game_path)?;
    let probs: Vec<f64> = serde_json::from_str(delta_json)
        .map_err(|e| Error::InvalidGameFile(format!("strategy is not a JSON array: {e}")))?;
    let delta = MixedStrategy::new(probs)?;
    let report = oracle::verify_epsilon_saddle(
        &game,
        &delta,
        epsilon.unwrap_or(solver::DEFAULT_EPSILON),
        oracle::DEFAULT_SAMPLES,
        seed_from_env(),
    )?;
    let pass = report.pass;
    Ok((serde_json::to_value(&report)?, pass))
}

/// `oracle grid <game-file>`: exhaustive minimax over the strategy grid.
pub fn cmd_oracle_grid(game_path: &Path, resolution: f64) -> CommandOutcome {
    match run_oracle_grid(game_path, resolution) {
        Ok(payload) => CommandOutcome::ok(payload),
        Err(err) => CommandOutcome::error(err),
    }
}

fn run_oracle_grid(game_path: &Path, resolution: f64) -> Result<Value> {
    let game = LeakageGame::load(game_path)?;
    let result = oracle::grid_minimax(&game, resolution)?;
    Ok(serde_json::to_value(&result)?)
}

/// `crowds build <topology-file> -o <game-file>`: turn a topology into a
/// placement game over its candidate locations.
pub fn cmd_crowds_build(topology_path: &Path, out_path: &Path) -> CommandOutcome {
    match run_crowds_build(topology_path, out_path) {
        Ok(payload) => CommandOutcome::ok(payload),
        Err(err) => CommandOutcome::error(err),
    }
}

fn run_crowds_build(topology_path: &Path, out_path: &Path) -> Result<Value> {
    let config = crowds::CrowdsConfig::load(topology_path)?;
    let adjacency = crowds::build_adjacency(&config.topology);
    let edges: usize = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
    let candidates: Vec<usize> = (0..config.topology.candidate_locations.len()).collect();
    let game = crowds::case_study_game(&config, &candidates, &candidates)?;
    write_json(out_path, &canonical_floats(game.to_json_value()?))?;
    Ok(json!({
        "nodes": config.topology.nodes.len(),
        "edges": edges,
        "defender_actions": game.num_defender_actions(),
        "attacker_actions": game.num_attacker_actions(),
        "output": out_path.display().to_string(),
    }))
}

/// `examples list`: the bundled fixture catalog.
pub fn cmd_examples_list() -> CommandOutcome {
    let entries: Vec<Value> = fixtures::CATALOG
        .iter()
        .map(|info| {
            json!({
                "name": info.name,
                "kind": match info.kind {
                    fixtures::FixtureKind::Game => "game",
                    fixtures::FixtureKind::Topology => "topology",
                },
                "description": info.description,
            })
        })
        .collect();
    CommandOutcome::ok(json!({ "fixtures": entries }))
}

/// `examples emit <name>`: write a bundled fixture to a file or stdout.
pub fn cmd_examples_emit(name: &str, out: Option<&Path>) -> CommandOutcome {
    match run_examples_emit(name, out) {
        Ok(payload) => CommandOutcome::ok(payload),
        Err(err) => CommandOutcome::error(err),
    }
}

fn run_examples_emit(name: &str, out: Option<&Path>) -> Result<Value> {
    let value = canonical_floats(fixtures::emit(name)?);
    match out {
        Some(path) => {
            write_json(path, &value)?;
            Ok(json!({ "name": name, "written": path.display().to_string() }))
        }
        None => Ok(value),
    }
}
