//! Fingerprint states and the subset-phase messages parties send.
//!
//! Indexing is 0-based: bit `z_i` of an `n`-bit input drives basis state
//! `|i>`, `i in [0, n)`. All constructed states are normalized.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::basis::{mask_elements, SubsetBasis};
use crate::groups::{AbelianGroup, Character, GroupElement};
use crate::quantum::StateVector;
use crate::{Error, Result};

/// A non-empty bit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryString(Vec<bool>);

impl BinaryString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidInput("empty bit string".into()));
        }
        Ok(BinaryString(bits))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![false; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::new((0..n).map(|_| rng.random::<bool>()).collect())
    }

    /// Low `n` bits of `mask`, bit `i` of the mask at position `i`.
    pub fn from_mask(mask: u64, n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i < 64 && mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    fn same_len(&self, other: &BinaryString) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "bit strings of lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    /// Bitwise XOR, i.e. addition in `Z_2^n`.
    pub fn xor(&self, other: &BinaryString) -> Result<BinaryString> {
        self.same_len(other)?;
        Ok(BinaryString(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    pub fn hamming(&self, other: &BinaryString) -> Result<usize> {
        Ok(self.xor(other)?.weight())
    }

    /// Appends `extra` zero bits.
    pub fn zero_extended(&self, extra: usize) -> BinaryString {
        let mut bits = self.0.clone();
        bits.resize(self.len() + extra, false);
        BinaryString(bits)
    }

    /// `(-1)^{z_i}` for each position.
    pub fn sign_factors(&self) -> Vec<Complex64> {
        self.0
            .iter()
            .map(|&b| Complex64::new(if b { -1.0 } else { 1.0 }, 0.0))
            .collect()
    }
}

impl FromStr for BinaryString {
    type Err = Error;

    /// Accepts `"0110"` or a repeated pattern `"01^4"` (= `"01010101"`).
    fn from_str(s: &str) -> Result<Self> {
        let (pattern, count) = match s.split_once('^') {
            Some((p, c)) => {
                let count = c.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: 1,
                    column: p.len() + 2,
                    message: format!("bad repeat count {c:?}"),
                })?;
                (p.trim(), count)
            }
            None => (s.trim(), 1),
        };
        let bits = pattern
            .chars()
            .enumerate()
            .map(|(i, ch)| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    line: 1,
                    column: i + 1,
                    message: format!("expected '0' or '1', found {ch:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        BinaryString::new(bits.repeat(count))
    }
}

impl fmt::Display for BinaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `(1/sqrt(m)) sum_i phases_i |i>`.
pub fn phase_state(phases: Vec<Complex64>) -> Result<StateVector> {
    if phases.is_empty() {
        return Err(Error::InvalidInput(
            "fingerprint over an empty register".into(),
        ));
    }
    let scale = (phases.len() as f64).sqrt();
    let amps = phases.into_iter().map(|p| p / scale).collect();
    StateVector::from_amplitudes(amps)
}

/// `|h_z> = (1/sqrt n) sum_i (-1)^{z_i} |i>`.
pub fn binary_fingerprint(z: &BinaryString) -> Result<StateVector> {
    phase_state(z.sign_factors())
}

/// Elementary symmetric polynomial `e_s` of `values`.
pub(crate) fn elementary_symmetric(values: &[f64], s: usize) -> f64 {
    let mut e = vec![0.0; s + 1];
    e[0] = 1.0;
    for &v in values {
        for k in (1..=s.min(values.len())).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e[s]
}

/// The message `sum_{|A| = s} (prod_{i in A} factors_i) |A>` over the colex
/// subset basis, normalized.
pub fn product_message(factors: &[Complex64], s: usize) -> Result<StateVector> {
    let n = factors.len();
    if s == 0 || s > n {
        return Err(Error::Range(format!("subset size {s} not in [1, {n}]")));
    }
    let basis = SubsetBasis::new(n, s)?;
    let weights: Vec<f64> = factors.iter().map(|f| f.norm_sqr()).collect();
    let norm = elementary_symmetric(&weights, s).sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidInput("all message amplitudes vanish".into()));
    }
    let amps = basis
        .masks()
        .map(|mask| {
            mask_elements(mask).fold(Complex64::new(1.0, 0.0), |acc, i| acc * factors[i]) / norm
        })
        .collect();
    StateVector::from_amplitudes(amps)
}

/// `sum_{|A| = s} (-1)^{sum_{i in A} z_i} |A>`, normalized.
pub fn subset_phase_message(z: &BinaryString, s: usize) -> Result<StateVector> {
    product_message(&z.sign_factors(), s)
}

/// `(chi_1(g), ..., chi_m(g))`.
pub fn character_factors(
    group: &AbelianGroup,
    g: &GroupElement,
    chars: &[Character],
) -> Result<Vec<Complex64>> {
    chars.iter().map(|chi| group.char_eval(chi, g)).collect()
}

/// `sum_{A ⊆ [m], |A| = s} (prod_{i in A} chi_i(g)) |A>`, normalized.
pub fn group_subset_message(
    group: &AbelianGroup,
    g: &GroupElement,
    chars: &[Character],
    s: usize,
) -> Result<StateVector> {
    product_message(&character_factors(group, g, chars)?, s)
}

/// `|h^G_g> = (1/sqrt m) sum_i chi_i(g) |i>`.
pub fn group_fingerprint(
    group: &AbelianGroup,
    g: &GroupElement,
    chars: &[Character],
) -> Result<StateVector> {
    phase_state(character_factors(group, g, chars)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::binom;
    use crate::groups::{sample_characters, CharacterSampling};
    use crate::quantum::inner_product;
    use crate::sampling::rng_for;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn parses_bit_strings() {
        assert_eq!(
            "0^16".parse::<BinaryString>().unwrap(),
            BinaryString::zeros(16).unwrap()
        );
        assert_eq!(
            "01^3".parse::<BinaryString>().unwrap().to_string(),
            "010101"
        );
        assert_eq!("1101".parse::<BinaryString>().unwrap().weight(), 3);
        assert!(matches!(
            "10a1".parse::<BinaryString>(),
            Err(Error::Parse { column: 3, .. })
        ));
        assert!("".parse::<BinaryString>().is_err());
        assert!("0^0".parse::<BinaryString>().is_err());
    }

    #[test]
    fn zero_input_gives_uniform_superposition() {
        let h = binary_fingerprint(&BinaryString::zeros(5).unwrap()).unwrap();
        for a in h.amplitudes() {
            assert_abs_diff_eq!(a.re, 1.0 / 5f64.sqrt(), epsilon = 1e-15);
        }
        let msg = subset_phase_message(&BinaryString::zeros(6).unwrap(), 3).unwrap();
        assert_eq!(msg.dim(), 20);
        for a in msg.amplitudes() {
            assert_abs_diff_eq!(a.re, 1.0 / 20f64.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn fingerprint_overlap_is_one_minus_twice_relative_distance() {
        let mut rng = rng_for(21, 0);
        for _ in 0..100 {
            let x = BinaryString::random(32, &mut rng).unwrap();
            let y = BinaryString::random(32, &mut rng).unwrap();
            let ip = inner_product(
                &binary_fingerprint(&x).unwrap(),
                &binary_fingerprint(&y).unwrap(),
            )
            .unwrap();
            let d = x.hamming(&y).unwrap() as f64;
            assert_abs_diff_eq!(ip.re, 1.0 - 2.0 * d / 32.0, epsilon = 1e-12);
            assert_abs_diff_eq!(ip.im, 0.0, epsilon = 1e-15);
        }
        let x = BinaryString::random(32, &mut rng).unwrap();
        let h = binary_fingerprint(&x).unwrap();
        assert_abs_diff_eq!(inner_product(&h, &h).unwrap().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn xor_fingerprint_signs_multiply() {
        let mut rng = rng_for(22, 0);
        let x = BinaryString::random(20, &mut rng).unwrap();
        let y = BinaryString::random(20, &mut rng).unwrap();
        let hx = binary_fingerprint(&x).unwrap();
        let hy = binary_fingerprint(&y).unwrap();
        let hxy = binary_fingerprint(&x.xor(&y).unwrap()).unwrap();
        let scale = 20f64.sqrt();
        for i in 0..20 {
            let prod = hx.amplitudes()[i] * hy.amplitudes()[i] * scale;
            assert_abs_diff_eq!((prod - hxy.amplitudes()[i]).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_inputs_rejected() {
        assert!(BinaryString::new(vec![]).is_err());
        assert!(phase_state(vec![]).is_err());
        let z = BinaryString::zeros(4).unwrap();
        assert!(matches!(subset_phase_message(&z, 5), Err(Error::Range(_))));
        assert!(matches!(subset_phase_message(&z, 0), Err(Error::Range(_))));
    }

    #[test]
    fn message_register_cost() {
        let msg = subset_phase_message(&BinaryString::zeros(16).unwrap(), 4).unwrap();
        assert_eq!(msg.dim(), 1820);
        assert_eq!((msg.dim() as f64).log2().ceil() as u32, 11);
    }

    #[test]
    fn group_messages() {
        let g: AbelianGroup = "5x7".parse().unwrap();
        let chars = sample_characters(&g, 9, 1, CharacterSampling::WithReplacement).unwrap();
        let uniform = group_subset_message(&g, &g.identity(), &chars, 3).unwrap();
        for a in uniform.amplitudes() {
            assert_abs_diff_eq!(
                (a - Complex64::new(1.0 / 84f64.sqrt(), 0.0)).norm(),
                0.0,
                epsilon = 1e-12
            );
        }
        let x = g.element(vec![2, 5]).unwrap();
        let msg = group_subset_message(&g, &x, &chars, 3).unwrap();
        assert!(msg.is_normalized());
        for a in msg.amplitudes() {
            assert_abs_diff_eq!(a.norm(), 1.0 / 84f64.sqrt(), epsilon = 1e-12);
        }
        let fp = group_fingerprint(&g, &g.identity(), &chars).unwrap();
        for a in fp.amplitudes() {
            assert_abs_diff_eq!(a.re, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn binary_group_specializes_subset_phase_message() {
        let n = 10;
        let g = AbelianGroup::binary(n).unwrap();
        let chars: Vec<Character> = (0..n)
            .map(|i| {
                let mut a = vec![0; n];
                a[i] = 1;
                g.character(a).unwrap()
            })
            .collect();
        let mut rng = rng_for(23, 0);
        for _ in 0..10 {
            let z = BinaryString::random(n, &mut rng).unwrap();
            let elem = g
                .element(z.bits().iter().map(|&b| u64::from(b)).collect())
                .unwrap();
            let a = group_subset_message(&g, &elem, &chars, 3).unwrap();
            let b = subset_phase_message(&z, 3).unwrap();
            for (p, q) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert!((p - q).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn group_fingerprint_overlap_is_character_average() {
        let g: AbelianGroup = "5x7".parse().unwrap();
        let chars = sample_characters(&g, 11, 2, CharacterSampling::WithReplacement).unwrap();
        let a = g.element(vec![1, 3]).unwrap();
        let b = g.element(vec![4, 6]).unwrap();
        let ip = inner_product(
            &group_fingerprint(&g, &a, &chars).unwrap(),
            &group_fingerprint(&g, &b, &chars).unwrap(),
        )
        .unwrap();
        let expect = crate::groups::overlap(&g, &chars, &g.sub(&b, &a).unwrap()).unwrap();
        assert!((ip - expect).norm() <= 1e-12);
    }

    #[test]
    fn full_character_set_gives_orthogonal_fingerprints() {
        let g: AbelianGroup = "8".parse().unwrap();
        let chars: Vec<_> = g.characters().collect();
        let states: Vec<_> = g
            .elements()
            .map(|x| group_fingerprint(&g, &x, &chars).unwrap())
            .collect();
        for i in 0..8 {
            for j in 0..8 {
                let ip = inner_product(&states[i], &states[j]).unwrap().norm();
                assert_abs_diff_eq!(ip, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn group_message_product_rule() {
        let g: AbelianGroup = "6x4".parse().unwrap();
        let chars = sample_characters(&g, 8, 3, CharacterSampling::WithReplacement).unwrap();
        let a = g.element(vec![5, 1]).unwrap();
        let b = g.element(vec![2, 3]).unwrap();
        let ma = group_subset_message(&g, &a, &chars, 3).unwrap();
        let mb = group_subset_message(&g, &b, &chars, 3).unwrap();
        let mab = group_subset_message(&g, &g.add(&a, &b).unwrap(), &chars, 3).unwrap();
        let scale = (binom(8, 3) as f64).sqrt();
        for i in 0..mab.dim() {
            let prod = ma.amplitudes()[i] * mb.amplitudes()[i] * scale;
            assert!((prod - mab.amplitudes()[i]).norm() <= 1e-12);
        }
    }

    proptest! {
        #[test]
        fn flipping_a_bit_negates_subsets_containing_it(seed in any::<u64>(), n in 2usize..=12) {
            let mut rng = rng_for(seed, 0);
            let s = 1 + (seed as usize) % n;
            let z = BinaryString::random(n, &mut rng).unwrap();
            let j = (seed >> 8) as usize % n;
            let mut flipped = z.bits().to_vec();
            flipped[j] = !flipped[j];
            let flipped = BinaryString::new(flipped).unwrap();
            let a = subset_phase_message(&z, s).unwrap();
            let b = subset_phase_message(&flipped, s).unwrap();
            let basis = SubsetBasis::new(n, s).unwrap();
            let mut negated = 0;
            for (idx, mask) in basis.masks().enumerate() {
                let (p, q) = (a.amplitudes()[idx], b.amplitudes()[idx]);
                if mask >> j & 1 == 1 {
                    prop_assert!((p + q).norm() <= 1e-12);
                    negated += 1;
                } else {
                    prop_assert!((p - q).norm() <= 1e-12);
                }
            }
            prop_assert_eq!(negated as u64, binom(n - 1, s - 1));
        }

        #[test]
        fn constructed_states_are_normalized(seed in any::<u64>(), n in 1usize..=14) {
            let mut rng = rng_for(seed, 1);
            let z = BinaryString::random(n, &mut rng).unwrap();
            let s = 1 + (seed as usize) % n;
            prop_assert!(binary_fingerprint(&z).unwrap().is_normalized());
            prop_assert!(subset_phase_message(&z, s).unwrap().is_normalized());
        }
    }
}
