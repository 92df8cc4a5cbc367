//! Colinearity testing for four parties: two distributed fingerprint
//! constructions followed by a SWAP test between the referee's two states.

use num_complex::Complex64;
use rand::Rng;

use crate::budget::{DEFAULT_CODEWORD_BUDGET, DEFAULT_GROUP_BUDGET};
use crate::codes::BinaryLinearCode;
use crate::fingerprint::{binary_fingerprint, character_factors, group_fingerprint, BinaryString};
use crate::groups::{overlap, AbelianGroup, Character, GroupElement};
use crate::quantum::{inner_product, swap_test_accept, DensityMatrix, StateVector};
use crate::sampling;
use crate::{Error, Result};

use super::{comm_cost, pair_construction, sqrt_subset_size, ExactOptions, ProtocolKind};

#[derive(Debug, Clone, PartialEq)]
pub struct Lin4Config {
    /// Subset size; `round(sqrt(fingerprint length))` when unset.
    pub s: Option<usize>,
    /// Two-party construction repetitions per pair.
    pub repetitions: u32,
    /// Number of SWAP tests behind one decision.
    pub swap_reps: u32,
    /// Acceptance-frequency threshold for deciding "equal sums"; midpoint of
    /// the equal-sum and worst unequal-sum acceptance when unset.
    pub threshold: Option<f64>,
    /// Append zeros to codewords whenever some codeword is heavier than
    /// `n_out - distance`. Without it a codeword near all-ones flips almost
    /// every fingerprint sign and the SWAP test cannot see the difference.
    pub balance: bool,
    pub exact: ExactOptions,
    pub codeword_budget: u64,
    pub group_budget: u64,
    pub seed: u64,
}

impl Default for Lin4Config {
    fn default() -> Self {
        Lin4Config {
            s: None,
            repetitions: 1,
            swap_reps: 3,
            threshold: None,
            balance: true,
            exact: ExactOptions::default(),
            codeword_budget: DEFAULT_CODEWORD_BUDGET,
            group_budget: DEFAULT_GROUP_BUDGET,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lin4Outcome {
    /// SWAP acceptance on the two reduced states, given both constructions
    /// succeeded.
    pub acceptance: f64,
    /// SWAP acceptance had both constructions produced ideal fingerprints.
    pub pure_acceptance: f64,
    /// Acceptance the referee would see if the two sums were equal.
    pub equal_sum_acceptance: f64,
    /// Largest acceptance over every nonzero difference of sums, for the
    /// mixed states actually produced. `None` when too many differences.
    pub worst_unequal_acceptance: Option<f64>,
    /// Same as above for ideal fingerprints.
    pub pure_worst_unequal_acceptance: Option<f64>,
    pub threshold: Option<f64>,
    /// Probability that at least `ceil(threshold * swap_reps)` SWAP tests
    /// accept.
    pub decide_equal_probability: Option<f64>,
    /// One sampled decision (from `seed`).
    pub decision: Option<bool>,
    /// Probability that both constructions succeed.
    pub success_probability: f64,
    pub fidelities: [f64; 2],
    pub qubits_sent: u64,
    pub fingerprint_length: usize,
    pub subset_size: usize,
    pub padded: bool,
}

struct Pair {
    alice: Vec<Complex64>,
    bob: Vec<Complex64>,
    target: StateVector,
}

fn run_pair(pair: &Pair, s: usize, cfg: &Lin4Config) -> Result<(f64, f64, DensityMatrix)> {
    let opts = ExactOptions {
        with_state: true,
        ..cfg.exact.clone()
    };
    let c = pair_construction(&pair.alice, &pair.bob, &pair.target, s, &opts)?;
    match (c.fidelity, c.reduced_state) {
        (Some(f), Some(rho)) => {
            let p = 1.0 - (1.0 - c.success_probability).powi(cfg.repetitions as i32);
            Ok((p, f, rho))
        }
        _ => Err(Error::InvalidInput(format!(
            "subset size {s} never yields a single common element over {} positions",
            pair.alice.len()
        ))),
    }
}

/// `(1 + Tr(rho D rho D^dagger)) / 2` for a diagonal unitary `D`.
fn shifted_acceptance(rho: &DensityMatrix, phases: &[Complex64]) -> Result<f64> {
    swap_test_accept(rho, &rho.conjugate_diagonal(phases)?)
}

fn binomial_tail(r: u32, q: f64, at_least: u32) -> f64 {
    if at_least == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    let mut coeff = 1.0;
    for i in 0..=r {
        if i > 0 {
            coeff *= f64::from(r - i + 1) / f64::from(i);
        }
        if i >= at_least {
            total += coeff * q.powi(i as i32) * (1.0 - q).powi((r - i) as i32);
        }
    }
    total.clamp(0.0, 1.0)
}

fn compose<W>(
    pairs: [Pair; 2],
    s: usize,
    cfg: &Lin4Config,
    worst_unequal: W,
    pure_worst_unequal: Option<f64>,
) -> Result<Lin4Outcome>
where
    W: FnOnce(&DensityMatrix) -> Result<Option<f64>>,
{
    if cfg.repetitions == 0 || cfg.swap_reps == 0 {
        return Err(Error::Range("repetition counts must be positive".into()));
    }
    let length = pairs[0].target.dim();
    let (p12, f12, rho12) = run_pair(&pairs[0], s, cfg)?;
    let (p34, f34, rho34) = run_pair(&pairs[1], s, cfg)?;

    let acceptance = swap_test_accept(&rho12, &rho34)?;
    let equal_sum_acceptance = swap_test_accept(&rho12, &rho12)?;
    let ip = inner_product(&pairs[0].target, &pairs[1].target)?.norm_sqr();
    let pure_acceptance = (1.0 + ip) / 2.0;
    let worst_unequal_acceptance = worst_unequal(&rho12)?;

    let threshold = cfg
        .threshold
        .or_else(|| worst_unequal_acceptance.map(|w| (equal_sum_acceptance + w) / 2.0));
    let needed = threshold
        .map(|t| ((t * f64::from(cfg.swap_reps)).ceil().max(0.0) as u32).min(cfg.swap_reps));
    let decide_equal_probability = needed.map(|c| binomial_tail(cfg.swap_reps, acceptance, c));
    let decision = needed.map(|c| {
        let mut rng = sampling::rng_for(cfg.seed, 0);
        let accepts = (0..cfg.swap_reps)
            .filter(|_| rng.random::<f64>() < acceptance)
            .count() as u32;
        accepts >= c
    });

    Ok(Lin4Outcome {
        acceptance,
        pure_acceptance,
        equal_sum_acceptance,
        worst_unequal_acceptance,
        pure_worst_unequal_acceptance: pure_worst_unequal.map(|o| (1.0 + o) / 2.0),
        threshold,
        decide_equal_probability,
        decision,
        success_probability: p12 * p34,
        fidelities: [f12, f34],
        qubits_sent: comm_cost(ProtocolKind::Lin4, length, s, cfg.repetitions)
            * u64::from(cfg.swap_reps),
        fingerprint_length: length,
        subset_size: s,
        padded: false,
    })
}

/// Lin4 over `Z_2^k`: decides whether `x1 + x2 = x3 + x4` (bitwise XOR).
pub fn lin4_z2n(
    inputs: &[BinaryString; 4],
    code: &BinaryLinearCode,
    cfg: &Lin4Config,
) -> Result<Lin4Outcome> {
    let needs_padding =
        cfg.balance && code.max_weight(cfg.codeword_budget)? > code.n_out() - code.distance();
    let code = if needs_padding {
        code.zero_padded(code.n_out())?
    } else {
        code.clone()
    };
    let length = code.n_out();
    let words = inputs
        .iter()
        .map(|x| code.encode(x))
        .collect::<Result<Vec<_>>>()?;
    let s = cfg.s.unwrap_or_else(|| sqrt_subset_size(length));
    let pair = |a: &BinaryString, b: &BinaryString| -> Result<Pair> {
        Ok(Pair {
            alice: a.sign_factors(),
            bob: b.sign_factors(),
            target: binary_fingerprint(&a.xor(b)?)?,
        })
    };
    let pairs = [pair(&words[0], &words[1])?, pair(&words[2], &words[3])?];

    let codewords = code.nonzero_codewords(cfg.codeword_budget)?;
    let signs = |c: u64| -> Vec<Complex64> {
        (0..length)
            .map(|i| Complex64::new(if c >> i & 1 == 1 { -1.0 } else { 1.0 }, 0.0))
            .collect()
    };
    let pure_worst = codewords
        .iter()
        .map(|c| (1.0 - 2.0 * c.count_ones() as f64 / length as f64).powi(2))
        .fold(0.0f64, f64::max);
    let worst = |rho: &DensityMatrix| -> Result<Option<f64>> {
        let mut best = f64::NEG_INFINITY;
        for &c in &codewords {
            best = best.max(shifted_acceptance(rho, &signs(c))?);
        }
        Ok(best.is_finite().then_some(best))
    };
    let mut out = compose(pairs, s, cfg, worst, Some(pure_worst))?;
    out.padded = needs_padding;
    Ok(out)
}

/// Lin4 in an arbitrary finite Abelian group, using character fingerprints
/// over `chars`.
pub fn lin4_group(
    group: &AbelianGroup,
    inputs: &[GroupElement; 4],
    chars: &[Character],
    cfg: &Lin4Config,
) -> Result<Lin4Outcome> {
    let m = chars.len();
    if m == 0 {
        return Err(Error::Range("need at least one character".into()));
    }
    let s = cfg.s.unwrap_or_else(|| sqrt_subset_size(m));
    let pair = |a: &GroupElement, b: &GroupElement| -> Result<Pair> {
        Ok(Pair {
            alice: character_factors(group, a, chars)?,
            bob: character_factors(group, b, chars)?,
            target: group_fingerprint(group, &group.add(a, b)?, chars)?,
        })
    };
    let pairs = [pair(&inputs[0], &inputs[1])?, pair(&inputs[2], &inputs[3])?];

    let enumerable = group.order() <= u128::from(cfg.group_budget);
    let pure_worst = if enumerable {
        let mut best = 0.0f64;
        for delta in group.elements().skip(1) {
            best = best.max(overlap(group, chars, &delta)?.norm_sqr());
        }
        Some(best)
    } else {
        None
    };
    let worst = |rho: &DensityMatrix| -> Result<Option<f64>> {
        if !enumerable {
            return Ok(None);
        }
        let mut best = f64::NEG_INFINITY;
        for delta in group.elements().skip(1) {
            best = best.max(shifted_acceptance(
                rho,
                &character_factors(group, &delta, chars)?,
            )?);
        }
        Ok(best.is_finite().then_some(best))
    };
    compose(pairs, s, cfg, worst, pure_worst)
}
