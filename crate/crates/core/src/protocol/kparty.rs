use crate::fingerprint::{binary_fingerprint, subset_phase_message, BinaryString};
use crate::{Error, Result};

use super::{comm_cost, dense, ExactOptions, ProtocolKind, ProtocolOutcome};

/// `round(n^{(k-1)/k})`, the subset size for `k` parties.
pub fn kparty_subset_size(n: usize, k: usize) -> usize {
    let k = k.max(1) as f64;
    ((n as f64).powf((k - 1.0) / k).round() as usize).clamp(1, n.max(1))
}

/// Exact `k`-party construction: every party sends its subset-phase message,
/// the referee keeps tuples whose sets have exactly one common element, and
/// the result is compared with the fingerprint of the XOR of all inputs.
///
/// Always uses the dense engine, so `C(n,s)^k` must fit `opts.budget`.
pub fn kparty_exact(
    inputs: &[BinaryString],
    s: usize,
    opts: &ExactOptions,
) -> Result<ProtocolOutcome> {
    let k = inputs.len();
    if k < 2 {
        return Err(Error::Range(format!("need at least two parties, got {k}")));
    }
    let n = inputs[0].len();
    let mut sum = inputs[0].clone();
    for x in &inputs[1..] {
        sum = sum.xor(x)?;
    }
    if s == 0 || s > n {
        return Err(Error::Range(format!("subset size {s} not in [1, {n}]")));
    }
    dense::check_budget(n, s, k, opts.budget)?;
    let target = binary_fingerprint(&sum)?;
    let messages = inputs
        .iter()
        .map(|x| subset_phase_message(x, s))
        .collect::<Result<Vec<_>>>()?;
    let c = dense::construct(&messages, n, s, &target, opts.budget, opts.with_state)?;
    Ok(c.into_outcome(comm_cost(ProtocolKind::KParty(k), n, s, 1), 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{protocol1_exact, ExactEngine};
    use crate::sampling::rng_for;

    #[test]
    fn subset_sizes() {
        assert_eq!(kparty_subset_size(16, 2), 4);
        assert_eq!(kparty_subset_size(8, 3), 4);
        assert_eq!(kparty_subset_size(27, 3), 9);
    }

    #[test]
    fn two_parties_reduce_to_protocol1() {
        let mut rng = rng_for(51, 0);
        let x = BinaryString::random(10, &mut rng).unwrap();
        let y = BinaryString::random(10, &mut rng).unwrap();
        let opts = ExactOptions {
            engine: ExactEngine::Dense,
            ..Default::default()
        };
        let k = kparty_exact(&[x.clone(), y.clone()], 3, &opts).unwrap();
        let p = protocol1_exact(&x, &y, 3, &opts).unwrap();
        assert_eq!(k, p);
    }

    #[test]
    fn errors() {
        let x = BinaryString::zeros(8).unwrap();
        assert!(kparty_exact(std::slice::from_ref(&x), 2, &ExactOptions::default()).is_err());
        let short = BinaryString::zeros(7).unwrap();
        assert!(kparty_exact(&[x.clone(), short], 2, &ExactOptions::default()).is_err());
        let big = BinaryString::zeros(16).unwrap();
        assert!(matches!(
            kparty_exact(
                &[big.clone(), big.clone(), big],
                4,
                &ExactOptions::default()
            ),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
