//! Command implementations behind the `netcoh` binary.
//!
//! Every command produces a deterministic text document (JSON, or CSV for
//! `sweep`) so the same configuration always yields byte-identical output.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use netcoh::classical::{
    check_predicate, classical_distribution, predicate_infeasibility_proof, ClassicalParams, PredicateVerdict,
    PREDICATE_TOLERANCE,
};
use netcoh::fock::simulate_ring;
use netcoh::geometry::no_separating_hyperplane_report;
use netcoh::optimizer::{decompose_as_classical, maximize_classical_cn, DEFAULT_FEASIBILITY_TOLERANCE, DEFAULT_SEED};
use netcoh::witness::{evaluate_cn, logical_maximum, quantum_cn_value};
use netcoh::outcome::MAX_PARTIES;
use netcoh::OutcomeDistribution;

/// Restart count used when neither `--restarts` nor `NETCOH_RESTARTS` is set.
pub const DEFAULT_RESTARTS: usize = 500;

/// Environment variable overriding the default restart count.
pub const RESTARTS_ENV: &str = "NETCOH_RESTARTS";

/// Largest ring the Fock simulation will build from the command line.
pub const MAX_QUANTUM_PARTIES: usize = 12;

/// Numerically observed classical optimum of `C_n`, reported for comparison.
pub const CLASSICAL_REFERENCE: f64 = 0.25;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("computation failed: {0}")]
    Computation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Computation(_) => 3,
        }
    }
}

impl From<netcoh::Error> for CliError {
    fn from(e: netcoh::Error) -> Self {
        use netcoh::Error as E;
        match e {
            E::PostSelectionImpossible | E::DegenerateRouting | E::NotUnitary(_) | E::NotNormalized(_) | E::NotPostSelected => {
                CliError::Computation(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Quantum { parties: usize },
    Classical { params: PathBuf },
    Witness { dist: PathBuf },
    Bound { parties: usize },
    Feasibility { dist: PathBuf, tolerance: f64 },
    Geometry { parties: usize },
    Prove { parties: usize },
    Sweep { max_parties: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub restarts: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { command, seed: DEFAULT_SEED, restarts: DEFAULT_RESTARTS }
    }
}

/// On-disk distribution format: `{"parties": n, "probs": {"000": p, ...}}`.
/// Unlisted outcomes have probability zero; extra top-level fields are ignored.
#[derive(Debug, Deserialize)]
struct DistributionFile {
    parties: usize,
    probs: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    #[serde(default)]
    parties: Option<usize>,
    gamma: f64,
    p_zero: Vec<f64>,
    q_zero: Vec<f64>,
}

fn read_input(path: &Path) -> CliResult<String> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Validation(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

pub fn load_distribution(path: &Path) -> CliResult<OutcomeDistribution> {
    let file: DistributionFile = serde_json::from_str(&read_input(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(OutcomeDistribution::from_map(file.parties, file.probs.iter().map(|(k, v)| (k.as_str(), *v)))?)
}

pub fn load_params(path: &Path) -> CliResult<ClassicalParams> {
    let file: ParamsFile = serde_json::from_str(&read_input(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if let Some(n) = file.parties {
        if n != file.p_zero.len() {
            return Err(CliError::Validation(format!("parties = {n} but p_zero has {} entries", file.p_zero.len())));
        }
    }
    Ok(ClassicalParams::new(file.gamma, file.p_zero, file.q_zero)?)
}

#[derive(Serialize)]
struct QuantumOutput {
    parties: usize,
    probs: BTreeMap<String, f64>,
    success_probability: f64,
}

#[derive(Serialize)]
struct ClassicalOutput<'a> {
    parties: usize,
    probs: BTreeMap<String, f64>,
    params: &'a ClassicalParams,
}

#[derive(Serialize)]
struct WitnessOutput {
    parties: usize,
    value: f64,
    even_pair_sum: f64,
    odd_pair_sum: f64,
    logical_maximum: f64,
    classical_reference: f64,
    exceeds_classical_reference: bool,
    predicate: PredicateVerdict,
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Computation(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn check_quantum_parties(parties: usize) -> CliResult<()> {
    if !(2..=MAX_QUANTUM_PARTIES).contains(&parties) {
        return Err(CliError::Validation(format!(
            "quantum simulation supports 2..={MAX_QUANTUM_PARTIES} parties, got {parties}"
        )));
    }
    Ok(())
}

fn check_restarts(restarts: usize) -> CliResult<()> {
    if restarts == 0 {
        return Err(CliError::Validation("restarts must be at least 1".into()));
    }
    Ok(())
}

/// Execute one command and return the document it prints.
pub fn run(config: &RunConfig) -> CliResult<String> {
    match &config.command {
        Command::Quantum { parties } => {
            check_quantum_parties(*parties)?;
            let ring = simulate_ring(*parties)?;
            to_json(&QuantumOutput {
                parties: *parties,
                probs: ring.distribution.to_map(),
                success_probability: ring.success_probability,
            })
        }
        Command::Classical { params } => {
            let params = load_params(params)?;
            let dist = classical_distribution(&params);
            to_json(&ClassicalOutput { parties: params.parties(), probs: dist.to_map(), params: &params })
        }
        Command::Witness { dist } => {
            let dist = load_distribution(dist)?;
            let w = evaluate_cn(&dist);
            to_json(&WitnessOutput {
                parties: w.parties,
                value: w.value,
                even_pair_sum: w.even_pair_sum,
                odd_pair_sum: w.odd_pair_sum,
                logical_maximum: logical_maximum(w.parties)?,
                classical_reference: CLASSICAL_REFERENCE,
                exceeds_classical_reference: w.value > CLASSICAL_REFERENCE + DEFAULT_FEASIBILITY_TOLERANCE,
                predicate: check_predicate(&dist, PREDICATE_TOLERANCE),
            })
        }
        Command::Bound { parties } => {
            check_restarts(config.restarts)?;
            to_json(&maximize_classical_cn(*parties, config.restarts, config.seed)?)
        }
        Command::Feasibility { dist, tolerance } => {
            check_restarts(config.restarts)?;
            if !(*tolerance > 0.0 && tolerance.is_finite()) {
                return Err(CliError::Validation(format!("tolerance must be positive, got {tolerance}")));
            }
            let dist = load_distribution(dist)?;
            to_json(&decompose_as_classical(&dist, config.restarts, config.seed, *tolerance)?)
        }
        Command::Geometry { parties } => to_json(&no_separating_hyperplane_report(*parties)?),
        Command::Prove { parties } => to_json(&predicate_infeasibility_proof(*parties)?),
        Command::Sweep { max_parties } => sweep(*max_parties, config.restarts, config.seed),
    }
}

/// CSV of the exact quantum `C_n` versus the best classical value found, for
/// `n = 2..=max_parties`.
pub fn sweep(max_parties: usize, restarts: usize, seed: u64) -> CliResult<String> {
    if !(2..=MAX_PARTIES).contains(&max_parties) {
        return Err(CliError::Validation(format!("max-parties must lie in 2..={MAX_PARTIES}, got {max_parties}")));
    }
    check_restarts(restarts)?;
    let mut out = String::from("n,cn_quantum,cn_classical_max,gap,restarts,seed\n");
    for n in 2..=max_parties {
        let quantum = quantum_cn_value(n)?;
        let classical = maximize_classical_cn(n, restarts, seed)?.best_value;
        out.push_str(&format!("{n},{quantum},{classical},{},{restarts},{seed}\n", quantum - classical));
    }
    Ok(out)
}

/// Write `text` to `output`, or to stdout when no path is given.
pub fn emit(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Computation(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Validation(String::new()).exit_code(), 2);
        assert_eq!(CliError::Computation(String::new()).exit_code(), 3);
        assert_eq!(CliError::from(netcoh::Error::PostSelectionImpossible).exit_code(), 3);
        assert_eq!(CliError::from(netcoh::Error::TooFewParties(1)).exit_code(), 2);
    }

    #[test]
    fn quantum_rejects_out_of_range() {
        assert!(matches!(run(&RunConfig::new(Command::Quantum { parties: 1 })), Err(CliError::Validation(_))));
        assert!(matches!(
            run(&RunConfig::new(Command::Quantum { parties: MAX_QUANTUM_PARTIES + 1 })),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn sweep_rows() {
        let csv = sweep(3, 64, DEFAULT_SEED).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,cn_quantum,cn_classical_max,gap,restarts,seed");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("3,0.375,"));
    }
}
