//! Named problems available to the command line.

use std::collections::BTreeMap;

use hbvm_core::systems::{self, validate_at, ValidationReport};
use hbvm_core::HamiltonianProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

/// Samples drawn around the problem's default initial state when a new
/// problem is registered with validation switched on.
pub const VALIDATION_SAMPLES: usize = 32;
pub const VALIDATION_RADIUS: f64 = 0.2;
const VALIDATION_SEED: u64 = 0x4842_564d;

pub struct ProblemRegistry {
    problems: BTreeMap<String, Box<dyn HamiltonianProblem>>,
}

impl ProblemRegistry {
    pub fn empty() -> Self {
        Self {
            problems: BTreeMap::new(),
        }
    }

    /// Registry holding `quartic`, `harmonic` and `kepler`.
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        for name in systems::BUILTIN_NAMES {
            let problem = systems::builtin(name).expect("builtin names resolve");
            reg.problems.insert(name.to_string(), problem);
        }
        reg
    }

    /// Adds `problem` under its own name. With `validate`, gradient, Jacobian
    /// and invariance identities are checked at random states first and the
    /// problem is rejected if any tolerance is exceeded.
    pub fn register(
        &mut self,
        problem: Box<dyn HamiltonianProblem>,
        validate: bool,
    ) -> CliResult<()> {
        let name = problem.name().to_string();
        if self.problems.contains_key(&name) {
            return Err(CliError::Config(format!(
                "problem '{name}' is already registered"
            )));
        }
        if validate {
            let report = sample_validation(problem.as_ref())?;
            if !report.passed() {
                return Err(CliError::Config(format!(
                    "problem '{name}' failed validation: {report:?}"
                )));
            }
        }
        self.problems.insert(name, problem);
        Ok(())
    }

    pub fn get(&self, name: &str) -> CliResult<&dyn HamiltonianProblem> {
        self.problems.get(name).map(|p| p.as_ref()).ok_or_else(|| {
            CliError::Config(format!(
                "unknown problem '{name}' (known: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&str> {
        self.problems.keys().map(String::as_str).collect()
    }
}

/// Structural checks at states scattered uniformly in a box around the
/// default initial state.
pub fn sample_validation(problem: &dyn HamiltonianProblem) -> CliResult<ValidationReport> {
    let center = problem.default_initial_state();
    let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
    let states: Vec<Vec<f64>> = (0..VALIDATION_SAMPLES)
        .map(|_| {
            center
                .iter()
                .map(|c| c + rng.gen_range(-VALIDATION_RADIUS..VALIDATION_RADIUS))
                .collect()
        })
        .collect();
    Ok(validate_at(problem, &states)?)
}
