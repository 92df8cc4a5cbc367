use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

use crate::fingerprint::{
    binary_fingerprint, character_factors, group_fingerprint, product_message, BinaryString,
};
use crate::groups::{AbelianGroup, Character, GroupElement};
use crate::quantum::StateVector;
use crate::sampling::{self, RateEstimate};
use crate::{Error, Result};

use super::{
    comm_cost, dense, generating, Construction, ExactEngine, ExactOptions, Mode, ProtocolConfig,
    ProtocolKind, ProtocolOutcome,
};

fn use_dense(opts: &ExactOptions) -> bool {
    opts.engine == ExactEngine::Dense
}

/// Distributed construction from two product messages with per-element
/// factors `alice` and `bob`, measured against `target`.
pub fn pair_construction(
    alice: &[Complex64],
    bob: &[Complex64],
    target: &StateVector,
    s: usize,
    opts: &ExactOptions,
) -> Result<Construction> {
    let n = alice.len();
    if bob.len() != n {
        return Err(Error::Shape(format!(
            "inputs of lengths {n} and {}",
            bob.len()
        )));
    }
    if s == 0 || s > n {
        return Err(Error::Range(format!("subset size {s} not in [1, {n}]")));
    }
    if use_dense(opts) {
        dense::check_budget(n, s, 2, opts.budget)?;
        let messages = [product_message(alice, s)?, product_message(bob, s)?];
        dense::construct(&messages, n, s, target, opts.budget, opts.with_state)
    } else {
        generating::construct(alice, bob, s, target, opts.with_state)
    }
}

/// One exact two-party run: the referee's state is compared with
/// `|h_{x xor y}>`.
pub fn protocol1_exact(
    x: &BinaryString,
    y: &BinaryString,
    s: usize,
    opts: &ExactOptions,
) -> Result<ProtocolOutcome> {
    let target = binary_fingerprint(&x.xor(y)?)?;
    let c = pair_construction(&x.sign_factors(), &y.sign_factors(), &target, s, opts)?;
    Ok(c.into_outcome(comm_cost(ProtocolKind::Protocol1, x.len(), s, 1), 1))
}

/// The group-character variant: Alice holds `g1`, Bob `g2`, and the target
/// is `|h^G_{g1+g2}>` over the `m = chars.len()` characters.
pub fn group_pair_exact(
    group: &AbelianGroup,
    g1: &GroupElement,
    g2: &GroupElement,
    chars: &[Character],
    s: usize,
    opts: &ExactOptions,
) -> Result<ProtocolOutcome> {
    let target = group_fingerprint(group, &group.add(g1, g2)?, chars)?;
    let alice = character_factors(group, g1, chars)?;
    let bob = character_factors(group, g2, chars)?;
    let c = pair_construction(&alice, &bob, &target, s, opts)?;
    Ok(c.into_outcome(comm_cost(ProtocolKind::Protocol1, chars.len(), s, 1), 1))
}

/// `r` independent runs sent at once; the referee keeps the state of the
/// first run that does not fail. Every successful run leaves the same
/// reduced state, so only the success probability changes:
/// `1 - (1 - p)^r`.
pub fn repeated_protocol(
    x: &BinaryString,
    y: &BinaryString,
    s: usize,
    repetitions: u32,
    opts: &ExactOptions,
) -> Result<ProtocolOutcome> {
    if repetitions == 0 {
        return Err(Error::Range("need at least one repetition".into()));
    }
    let single = protocol1_exact(x, y, s, opts)?;
    Ok(ProtocolOutcome {
        success_probability: at_least_once(single.success_probability, repetitions),
        qubits_sent: single.qubits_sent * u64::from(repetitions),
        repetitions_used: repetitions,
        ..single
    })
}

/// `1 - (1 - p)^r`, returning `p` itself for a single run.
fn at_least_once(p: f64, r: u32) -> f64 {
    if r == 1 {
        p
    } else {
        1.0 - (1.0 - p).powi(r as i32)
    }
}

/// `(1 - p)^r`, exactly.
pub fn failure_probability(p: &BigRational, repetitions: u32) -> BigRational {
    let q = BigRational::one() - p;
    num_traits::pow(q, repetitions as usize)
}

/// `ceil(ln(n) / (2 p))` runs, enough for all-fail probability `<= 1/sqrt(n)`
/// when each run succeeds with probability `p`.
pub fn sqrt_target_repetitions(p: f64, n: usize) -> u32 {
    ((n as f64).ln() / (2.0 * p)).ceil().max(1.0) as u32
}

/// Smallest `r` with `(1 - p)^r <= epsilon`.
pub fn repetitions_for_target(p: f64, epsilon: f64) -> Result<u32> {
    if !(p > 0.0 && p <= 1.0) || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Range(format!(
            "need p in (0, 1] and epsilon in (0, 1) (p={p}, epsilon={epsilon})"
        )));
    }
    if p == 1.0 {
        return Ok(1);
    }
    Ok((epsilon.ln() / (1.0 - p).ln()).ceil().max(1.0) as u32)
}

/// Monte Carlo run of the referee's measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledOutcome {
    pub outcome: ProtocolOutcome,
    pub estimate: RateEstimate,
    /// How often each `j` was the common element among accepted trials.
    pub j_counts: Vec<u64>,
    /// Pearson statistic of `j_counts` against the uniform law (`n - 1`
    /// degrees of freedom).
    pub j_chi_square: f64,
    /// Accepted trials whose amplitude did not factor as
    /// `(-1)^{x_j + y_j}` times the environment phase. Always zero for a
    /// correct construction.
    pub phase_mismatches: u64,
}

/// Samples `(A, B)` uniformly and accepts when `|A ∩ B| = 1`.
pub fn protocol1_sampled(
    x: &BinaryString,
    y: &BinaryString,
    s: usize,
    trials: u64,
    seed: u64,
) -> Result<SampledOutcome> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::Shape(format!(
            "inputs of lengths {n} and {}",
            y.len()
        )));
    }
    if s == 0 || s > n {
        return Err(Error::Range(format!("subset size {s} not in [1, {n}]")));
    }
    if trials == 0 {
        return Err(Error::Range("need at least one trial".into()));
    }
    let xs = x.bits();
    let ys = y.bits();
    let parity = |bits: &[bool], set: &[usize]| set.iter().filter(|&&i| bits[i]).count() % 2;

    let bins = sampling::histogram(trials, seed, 2 * n, |rng| {
        let a = sampling::sample_subset(rng, n, s);
        let b = sampling::sample_subset(rng, n, s);
        let common: Vec<usize> = a
            .iter()
            .copied()
            .filter(|i| b.binary_search(i).is_ok())
            .collect();
        if common.len() != 1 {
            return None;
        }
        let j = common[0];
        let joint = parity(xs, &a) ^ parity(ys, &b);
        let a_env: Vec<usize> = a.iter().copied().filter(|&i| i != j).collect();
        let b_env: Vec<usize> = b.iter().copied().filter(|&i| i != j).collect();
        let factored = (usize::from(xs[j] ^ ys[j])) ^ parity(xs, &a_env) ^ parity(ys, &b_env);
        Some(j + if joint == factored { 0 } else { n })
    });
    let j_counts: Vec<u64> = (0..n).map(|j| bins[j] + bins[j + n]).collect();
    let phase_mismatches = bins[n..].iter().sum();
    let accepted: u64 = j_counts.iter().sum();
    let estimate = RateEstimate::from_counts(accepted, trials);
    let expected = accepted as f64 / n as f64;
    let j_chi_square = if accepted == 0 {
        0.0
    } else {
        j_counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum()
    };
    Ok(SampledOutcome {
        outcome: ProtocolOutcome {
            success: accepted > 0,
            success_probability: estimate.estimate,
            fidelity: None,
            reduced_state: None,
            qubits_sent: comm_cost(ProtocolKind::Protocol1, n, s, 1),
            repetitions_used: 1,
        },
        estimate,
        j_counts,
        j_chi_square,
        phase_mismatches,
    })
}

/// Runs the two-party construction as configured (exact or sampled, with repetitions).
pub fn run_protocol1(
    x: &BinaryString,
    y: &BinaryString,
    cfg: &ProtocolConfig,
) -> Result<ProtocolOutcome> {
    cfg.validate()?;
    if x.len() != cfg.n || y.len() != cfg.n {
        return Err(Error::Shape(format!(
            "inputs of lengths {} and {}, configured n = {}",
            x.len(),
            y.len(),
            cfg.n
        )));
    }
    match cfg.mode {
        Mode::Exact => repeated_protocol(x, y, cfg.s, cfg.repetitions, &cfg.exact),
        Mode::MonteCarlo => {
            let sampled = protocol1_sampled(x, y, cfg.s, cfg.trials, cfg.seed)?;
            let p = sampled.outcome.success_probability;
            let r = cfg.repetitions;
            Ok(ProtocolOutcome {
                success_probability: at_least_once(p, r),
                qubits_sent: sampled.outcome.qubits_sent * u64::from(r),
                repetitions_used: r,
                ..sampled.outcome
            })
        }
    }
}
