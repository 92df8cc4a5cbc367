//! Fixed-size subsets of `[0, n)`: colex ranking, enumeration and exact
//! intersection probabilities.
//!
//! An `s`-subset is identified with the `u64` bitmask of its elements, which
//! caps the ground set at 64 elements. Colexicographic order on subsets is
//! exactly the numeric order of their masks, so Gosper's hack walks the basis
//! in rank order.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::sampling::{self, RateEstimate};
use crate::{Error, Result};

/// Largest supported ground set.
pub const MAX_N: usize = 64;

fn table() -> &'static [[u64; MAX_N + 1]; MAX_N + 1] {
    static TABLE: OnceLock<Box<[[u64; MAX_N + 1]; MAX_N + 1]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([[0u64; MAX_N + 1]; MAX_N + 1]);
        for n in 0..=MAX_N {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
            }
        }
        t
    })
}

/// `C(n, k)` for `n <= 64`; zero when `k > n`.
pub fn binom(n: usize, k: usize) -> u64 {
    assert!(n <= MAX_N, "binom: n = {n} exceeds {MAX_N}");
    if k > n {
        0
    } else {
        table()[n][k]
    }
}

/// `C(n, k)` for any `n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// `ceil(log2 x)`, the number of qubits needed for an `x`-dimensional register.
pub fn ceil_log2(x: &BigUint) -> u64 {
    if *x <= BigUint::one() {
        0
    } else {
        (x - 1u32).bits()
    }
}

/// The `C(n,s)` basis states `|A>`, `A ⊆ [0,n)`, `|A| = s`, in colex order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetBasis {
    n: usize,
    s: usize,
    dim: usize,
}

impl SubsetBasis {
    pub fn new(n: usize, s: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::Range(format!(
                "ground set size {n} not in [1, {MAX_N}]"
            )));
        }
        if s > n {
            return Err(Error::Range(format!("subset size {s} exceeds n = {n}")));
        }
        let dim = usize::try_from(binom(n, s))
            .map_err(|_| Error::Range(format!("C({n},{s}) does not fit in usize")))?;
        Ok(SubsetBasis { n, s, dim })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Colex rank of a sorted subset.
    pub fn rank(&self, subset: &[usize]) -> Result<usize> {
        if subset.len() != self.s {
            return Err(Error::InvalidSubset(format!(
                "expected {} elements, got {}",
                self.s,
                subset.len()
            )));
        }
        let mut rank = 0u64;
        for (i, &c) in subset.iter().enumerate() {
            if c >= self.n {
                return Err(Error::InvalidSubset(format!(
                    "element {c} not in [0, {})",
                    self.n
                )));
            }
            if i > 0 && subset[i - 1] >= c {
                return Err(Error::InvalidSubset(
                    "elements must be distinct and sorted ascending".into(),
                ));
            }
            rank += binom(c, i + 1);
        }
        Ok(rank as usize)
    }

    pub fn unrank(&self, index: usize) -> Result<Vec<usize>> {
        let mask = self.unrank_mask(index)?;
        Ok(mask_elements(mask).collect())
    }

    /// Colex rank of a subset given as a bitmask.
    pub fn rank_mask(&self, mask: u64) -> Result<usize> {
        if mask.count_ones() as usize != self.s {
            return Err(Error::InvalidSubset(format!(
                "expected {} elements, got {}",
                self.s,
                mask.count_ones()
            )));
        }
        if self.n < 64 && mask >> self.n != 0 {
            return Err(Error::InvalidSubset(format!(
                "element out of [0, {})",
                self.n
            )));
        }
        Ok(colex_rank(mask))
    }

    pub fn unrank_mask(&self, index: usize) -> Result<u64> {
        if index >= self.dim {
            return Err(Error::Range(format!(
                "index {index} not in [0, {})",
                self.dim
            )));
        }
        let mut r = index as u64;
        let mut mask = 0u64;
        let mut upper = self.n;
        for i in (1..=self.s).rev() {
            // largest c < upper with C(c, i) <= r
            let mut c = upper - 1;
            while binom(c, i) > r {
                c -= 1;
            }
            r -= binom(c, i);
            mask |= 1u64 << c;
            upper = c;
        }
        Ok(mask)
    }

    /// All basis masks in rank order.
    pub fn masks(&self) -> SubsetMasks {
        SubsetMasks::new(self.n, self.s)
    }
}

/// Colex rank of an arbitrary mask among subsets of the same size.
pub fn colex_rank(mask: u64) -> usize {
    mask_elements(mask)
        .enumerate()
        .map(|(i, c)| binom(c, i + 1))
        .sum::<u64>() as usize
}

/// Elements of a bitmask in ascending order.
pub fn mask_elements(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// Gosper's-hack iterator over the `s`-subsets of `[0, n)` in colex order.
#[derive(Debug, Clone)]
pub struct SubsetMasks {
    next: Option<u64>,
    limit: u64,
}

impl SubsetMasks {
    pub fn new(n: usize, s: usize) -> Self {
        assert!(n <= MAX_N && s <= n);
        let first = if s == 0 {
            0
        } else if s == 64 {
            u64::MAX
        } else {
            (1u64 << s) - 1
        };
        let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        SubsetMasks {
            next: Some(first),
            limit,
        }
    }
}

impl Iterator for SubsetMasks {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            match cur.checked_add(c) {
                Some(r) => {
                    let nxt = (((r ^ cur) >> 2) / c) | r;
                    (nxt <= self.limit && nxt & !self.limit == 0).then_some(nxt)
                }
                None => None,
            }
        };
        Some(cur)
    }
}

/// Probability that two independent uniform `s`-subsets of `[0,n)` share
/// exactly `t` elements: `C(s,t) C(n-s,s-t) / C(n,s)`.
pub fn intersection_probability(n: u64, s: u64, t: u64) -> Result<BigRational> {
    if n == 0 || s > n || t > s {
        return Err(Error::Range(format!(
            "need 0 <= t <= s <= n, n >= 1 (got n={n}, s={s}, t={t})"
        )));
    }
    let num = binomial(s, t) * binomial(n - s, s - t);
    let den = binomial(n, s);
    Ok(BigRational::new(num.into(), den.into()))
}

/// How [`common_element_probability_k`] is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbabilityMode {
    /// Full enumeration of all `C(n,s)^k` tuples, refused above `budget`.
    Exact {
        budget: u64,
    },
    MonteCarlo {
        trials: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Probability {
    Exact(BigRational),
    Estimate(RateEstimate),
}

impl Probability {
    pub fn value(&self) -> f64 {
        match self {
            Probability::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Probability::Estimate(e) => e.estimate,
        }
    }

    /// Three-sigma half width; zero for exact values.
    pub fn error_bar(&self) -> f64 {
        match self {
            Probability::Exact(_) => 0.0,
            Probability::Estimate(e) => e.error_bar(),
        }
    }
}

/// Probability that `k` independent uniform `s`-subsets of `[0,n)` have
/// exactly one element in common.
pub fn common_element_probability_k(
    n: usize,
    s: usize,
    k: usize,
    mode: ProbabilityMode,
) -> Result<Probability> {
    if s == 0 || s > n {
        return Err(Error::Range(format!("need 1 <= s <= n (s={s}, n={n})")));
    }
    if k < 2 {
        return Err(Error::Range(format!("need k >= 2 parties, got {k}")));
    }
    match mode {
        ProbabilityMode::Exact { budget } => {
            let basis = SubsetBasis::new(n, s)?;
            let total = BigUint::from(basis.dim() as u64).pow(k as u32);
            if total > BigUint::from(budget) {
                return Err(Error::budget_mc(
                    "exact common-element enumeration",
                    total,
                    budget,
                ));
            }
            let masks: Vec<u64> = basis.masks().collect();
            let hits = count_single_common(&masks, k, u64::MAX);
            Ok(Probability::Exact(BigRational::new(
                BigUint::from(hits).into(),
                total.into(),
            )))
        }
        ProbabilityMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::Range("Monte Carlo needs at least one trial".into()));
            }
            let hits = sampling::count_successes(trials, seed, |rng| {
                let mut common = sampling::sample_subset(rng, n, s);
                for _ in 1..k {
                    let next = sampling::sample_subset(rng, n, s);
                    common.retain(|x| next.binary_search(x).is_ok());
                }
                common.len() == 1
            });
            Ok(Probability::Estimate(RateEstimate::from_counts(
                hits, trials,
            )))
        }
    }
}

fn count_single_common(masks: &[u64], depth: usize, prefix: u64) -> u64 {
    if prefix == 0 {
        return 0;
    }
    if depth == 0 {
        return u64::from(prefix.count_ones() == 1);
    }
    masks
        .iter()
        .map(|&m| count_single_common(masks, depth - 1, prefix & m))
        .sum()
}
