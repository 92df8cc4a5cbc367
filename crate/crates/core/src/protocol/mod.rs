//! End-to-end protocol simulations.
//!
//! Each party's message is a *product message*: the amplitude of `|A>` is
//! `prod_{i in A} f_i` for per-element factors `f_i` (signs `(-1)^{x_i}` for
//! bit strings, character values `chi_i(g)` for group elements). The referee
//! keeps the basis tuples whose sets share exactly one element `j`, which
//! splits the surviving state into a `j` register and an environment holding
//! the remaining elements of every set.
//!
//! Two exact engines evaluate that construction:
//!
//! - [`dense`] builds every message, forms the tensor product, projects and
//!   partially traces it literally. Cost grows as `C(n,s)^k`.
//! - [`generating`] (two parties only) sums the environment analytically with
//!   a bivariate generating polynomial, in `O(n^3 s^2)` time.

mod cost;
pub mod dense;
pub mod generating;
mod kparty;
mod lin4;
mod two_party;

pub use cost::{comm_cost, ProtocolKind};
pub use kparty::{kparty_exact, kparty_subset_size};
pub use lin4::{lin4_group, lin4_z2n, Lin4Config, Lin4Outcome};
pub use two_party::{
    failure_probability, group_pair_exact, pair_construction, protocol1_exact, protocol1_sampled,
    repeated_protocol, repetitions_for_target, run_protocol1, sqrt_target_repetitions,
    SampledOutcome,
};

use crate::budget::DEFAULT_TUPLE_BUDGET;
use crate::quantum::DensityMatrix;
use crate::{Error, Result};

/// Which exact evaluator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExactEngine {
    /// Generating function for two parties; the dense engine is the only
    /// one for more parties.
    #[default]
    Auto,
    Dense,
    GeneratingFunction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOptions {
    pub engine: ExactEngine,
    /// Limit on enumerated basis tuples for the dense engine.
    pub budget: u64,
    /// Whether to return the referee's reduced density matrix.
    pub with_state: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            engine: ExactEngine::Auto,
            budget: DEFAULT_TUPLE_BUDGET,
            with_state: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Exact,
    MonteCarlo,
}

/// Parameters of a (possibly repeated) two-party run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub n: usize,
    pub s: usize,
    pub repetitions: u32,
    /// Target overall failure probability, see [`repetitions_for_target`].
    pub epsilon_target: f64,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    pub exact: ExactOptions,
}

impl ProtocolConfig {
    pub fn new(n: usize, s: usize) -> Result<Self> {
        let cfg = ProtocolConfig {
            n,
            s,
            repetitions: 1,
            epsilon_target: 0.1,
            mode: Mode::Exact,
            trials: 100_000,
            seed: 0,
            exact: ExactOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.s > self.n {
            return Err(Error::Range(format!(
                "subset size {} not in [1, {}]",
                self.s, self.n
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::Range("need at least one repetition".into()));
        }
        if self.mode == Mode::MonteCarlo && self.trials == 0 {
            return Err(Error::Range(
                "Monte Carlo mode needs at least one trial".into(),
            ));
        }
        if !(self.epsilon_target > 0.0 && self.epsilon_target < 1.0) {
            return Err(Error::Range(format!(
                "epsilon target {} not in (0, 1)",
                self.epsilon_target
            )));
        }
        Ok(())
    }
}

/// `round(sqrt(n))`, the default subset size.
pub fn sqrt_subset_size(n: usize) -> usize {
    ((n as f64).sqrt().round() as usize).clamp(1, n.max(1))
}

/// What the referee ends up with after one (or a repeated) execution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    /// Whether the referee can obtain a state at all (nonzero success
    /// probability in exact mode, at least one accepted trial when sampled).
    pub success: bool,
    pub success_probability: f64,
    /// `<target|rho|target>` conditional on success; `None` when the
    /// construction always fails or was only sampled.
    pub fidelity: Option<f64>,
    pub reduced_state: Option<DensityMatrix>,
    pub qubits_sent: u64,
    pub repetitions_used: u32,
}

/// Result of one exact construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub success_probability: f64,
    pub fidelity: Option<f64>,
    pub reduced_state: Option<DensityMatrix>,
}

impl Construction {
    pub(crate) fn failed() -> Self {
        Construction {
            success_probability: 0.0,
            fidelity: None,
            reduced_state: None,
        }
    }

    pub(crate) fn into_outcome(self, qubits_sent: u64, repetitions_used: u32) -> ProtocolOutcome {
        ProtocolOutcome {
            success: self.success_probability > 0.0,
            success_probability: self.success_probability,
            fidelity: self.fidelity,
            reduced_state: self.reduced_state,
            qubits_sent,
            repetitions_used,
        }
    }
}
