//! Literal simulation: tensor product, projection, re-indexing into
//! `(j, environment)` and partial trace.

use num_bigint::BigUint;

use crate::basis::{colex_rank, SubsetBasis};
use crate::quantum::{project, reduced_density, reduced_fidelity, StateVector};
use crate::{Error, Result};

use super::Construction;

/// Mixed-radix digits of a joint basis index, first party most significant.
fn digits(mut index: usize, dim: usize, k: usize, out: &mut [usize]) {
    for slot in out[..k].iter_mut().rev() {
        *slot = index % dim;
        index /= dim;
    }
}

/// Fails unless the `k`-fold joint state over `C(n,s)` subsets fits `budget`.
pub(crate) fn check_budget(n: usize, s: usize, k: usize, budget: u64) -> Result<()> {
    let tuples = crate::basis::binomial(n as u64, s as u64).pow(k as u32);
    if tuples > BigUint::from(budget) {
        return Err(Error::budget("dense joint state", tuples, budget));
    }
    Ok(())
}

/// Runs the referee's projection on `messages` (each over the `(n, s)`
/// subset basis) and measures the surviving `j` register against `target`.
pub fn construct(
    messages: &[StateVector],
    n: usize,
    s: usize,
    target: &StateVector,
    budget: u64,
    with_state: bool,
) -> Result<Construction> {
    let k = messages.len();
    if !(2..=64).contains(&k) {
        return Err(Error::Range(format!(
            "need between 2 and 64 parties, got {k}"
        )));
    }
    if s == 0 {
        return Err(Error::Range("subset size must be positive".into()));
    }
    let basis = SubsetBasis::new(n, s)?;
    let dim = basis.dim();
    if let Some(m) = messages.iter().find(|m| m.dim() != dim) {
        return Err(Error::Shape(format!(
            "message of dimension {}, subset basis has {dim}",
            m.dim()
        )));
    }
    if target.dim() != n {
        return Err(Error::Shape(format!(
            "target of dimension {}, expected {n}",
            target.dim()
        )));
    }
    check_budget(n, s, k, budget)?;

    let joint = messages[1..]
        .iter()
        .fold(messages[0].clone(), |acc, m| acc.tensor(m));
    let masks: Vec<u64> = basis.masks().collect();
    let common = |index: usize| {
        let mut d = [0usize; 64];
        digits(index, dim, k, &mut d);
        d[..k].iter().fold(u64::MAX, |acc, &r| acc & masks[r])
    };
    let projection = project(&joint, |i| common(i).count_ones() == 1)?;
    let Some(post) = projection.post_state else {
        return Ok(Construction::failed());
    };
    drop(joint);

    // Re-index the surviving amplitudes as |j>|A_1 - j, ..., A_k - j>.
    let env_dim = SubsetBasis::new(n, s - 1)?.dim();
    let mut entries: Vec<(usize, usize, usize)> = Vec::new();
    let mut d = [0usize; 64];
    for (index, amp) in post.amplitudes().iter().enumerate() {
        let c = common(index);
        if c.count_ones() != 1 || *amp == num_complex::Complex64::new(0.0, 0.0) {
            continue;
        }
        let j = c.trailing_zeros() as usize;
        digits(index, dim, k, &mut d);
        let env_key = d[..k]
            .iter()
            .fold(0usize, |key, &r| key * env_dim + colex_rank(masks[r] ^ c));
        entries.push((env_key, j, index));
    }
    let mut keys: Vec<usize> = entries.iter().map(|e| e.0).collect();
    keys.sort_unstable();
    keys.dedup();
    let env_count = keys.len();
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); n * env_count];
    for &(key, j, index) in &entries {
        let e = keys.binary_search(&key).expect("key collected above");
        amps[j * env_count + e] = post.amplitudes()[index];
    }
    drop(entries);
    drop(post);
    let split = StateVector::new(amps, vec![n, env_count])?;

    let fidelity = reduced_fidelity(&split, target, n)?;
    let reduced_state = if with_state {
        Some(reduced_density(&split, n)?)
    } else {
        None
    };
    Ok(Construction {
        success_probability: projection.probability,
        fidelity: Some(fidelity),
        reduced_state,
    })
}
