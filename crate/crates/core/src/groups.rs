//! Finite Abelian groups `Z_{d1} x ... x Z_{dr}` and their characters.
//!
//! Every character of such a group has the form
//! `chi_a(g) = prod_t exp(2 pi i a_t g_t / d_t)` for some `a` in the same
//! product, so characters are labelled by coordinate vectors just like
//! elements.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;

use crate::sampling;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    factors: Vec<u64>,
    order: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(Vec<u64>);

/// Label `a` of the character `chi_a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character(Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl Character {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(":"))
    }
}

/// How characters are drawn by [`sample_characters`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CharacterSampling {
    #[default]
    WithReplacement,
    WithoutReplacement,
}

impl AbelianGroup {
    /// Product of cyclic groups of the given orders (each at least 2).
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidInput(
                "group needs at least one cyclic factor".into(),
            ));
        }
        let mut order: u128 = 1;
        for &d in &factors {
            if d < 2 {
                return Err(Error::InvalidInput(format!(
                    "cyclic factor of order {d} (need >= 2)"
                )));
            }
            order = order
                .checked_mul(u128::from(d))
                .filter(|&o| o <= 1u128 << 64)
                .ok_or_else(|| Error::Range("group order exceeds 2^64".into()))?;
        }
        Ok(AbelianGroup { factors, order })
    }

    /// `Z_2^n`.
    pub fn binary(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn trivial_character(&self) -> Character {
        Character(vec![0; self.rank()])
    }

    fn check(&self, coords: &[u64], what: &str) -> Result<()> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidElement(format!(
                "{what} has {} coordinates, group has {} factors",
                coords.len(),
                self.rank()
            )));
        }
        for (t, (&c, &d)) in coords.iter().zip(&self.factors).enumerate() {
            if c >= d {
                return Err(Error::InvalidElement(format!(
                    "{what} coordinate {t} is {c}, must be below {d}"
                )));
            }
        }
        Ok(())
    }

    pub fn element(&self, coords: Vec<u64>) -> Result<GroupElement> {
        self.check(&coords, "element")?;
        Ok(GroupElement(coords))
    }

    pub fn character(&self, coords: Vec<u64>) -> Result<Character> {
        self.check(&coords, "character")?;
        Ok(Character(coords))
    }

    /// Parses `"3:6"` style coordinates (a bare integer for cyclic groups).
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let coords = text
            .split(':')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidElement(format!("cannot parse coordinate {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.element(coords)
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(&g.0, "element")?;
        self.check(&h.0, "element")?;
        Ok(GroupElement(
            g.0.iter()
                .zip(&h.0)
                .zip(&self.factors)
                .map(|((&a, &b), &d)| ((u128::from(a) + u128::from(b)) % u128::from(d)) as u64)
                .collect(),
        ))
    }

    pub fn neg(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(&g.0, "element")?;
        Ok(GroupElement(
            g.0.iter()
                .zip(&self.factors)
                .map(|(&a, &d)| if a == 0 { 0 } else { d - a })
                .collect(),
        ))
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.add(g, &self.neg(h)?)
    }

    /// `chi(g)`, a root of unity.
    pub fn char_eval(&self, chi: &Character, g: &GroupElement) -> Result<Complex64> {
        self.check(&chi.0, "character")?;
        self.check(&g.0, "element")?;
        Ok(self.char_eval_unchecked(chi, g))
    }

    fn char_eval_unchecked(&self, chi: &Character, g: &GroupElement) -> Complex64 {
        chi.0.iter().zip(&g.0).zip(&self.factors).fold(
            Complex64::new(1.0, 0.0),
            |acc, ((&a, &x), &d)| {
                let k = (u128::from(a) * u128::from(x) % u128::from(d)) as u64;
                acc * root_of_unity(k, d)
            },
        )
    }

    /// Element with mixed-radix index `index` (first factor least significant).
    pub fn element_at(&self, mut index: u128) -> Result<GroupElement> {
        if index >= self.order {
            return Err(Error::Range(format!(
                "element index {index} >= |G| = {}",
                self.order
            )));
        }
        let coords = self
            .factors
            .iter()
            .map(|&d| {
                let c = (index % u128::from(d)) as u64;
                index /= u128::from(d);
                c
            })
            .collect();
        Ok(GroupElement(coords))
    }

    /// All elements in mixed-radix order, identity first.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        let mut next = Some(self.identity());
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut succ = cur.0.clone();
            let mut carried = true;
            for (c, &d) in succ.iter_mut().zip(&self.factors) {
                *c += 1;
                if *c < d {
                    carried = false;
                    break;
                }
                *c = 0;
            }
            if !carried {
                next = Some(GroupElement(succ));
            }
            Some(cur)
        })
    }

    /// The character group, same order as [`AbelianGroup::elements`].
    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        self.elements().map(|g| Character(g.0))
    }

    /// `ceil(c * log2 |G|)`, at least 1.
    pub fn default_m(&self, c: f64) -> usize {
        ((c * (self.order as f64).log2()).ceil() as usize).max(1)
    }

    fn random_character<R: Rng + ?Sized>(&self, rng: &mut R) -> Character {
        Character(
            self.factors
                .iter()
                .map(|&d| rng.random_range(0..d))
                .collect(),
        )
    }
}

/// `exp(2 pi i k / d)`, exact at multiples of a quarter turn.
pub fn root_of_unity(k: u64, d: u64) -> Complex64 {
    let k = k % d;
    let k4 = u128::from(k) * 4;
    if k4 % u128::from(d) == 0 {
        return match k4 / u128::from(d) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * (k as f64 / d as f64);
    Complex64::new(theta.cos(), theta.sin())
}

impl FromStr for AbelianGroup {
    type Err = Error;

    /// `"d1xd2x...xdr"`, e.g. `"5x7"` or `"64"`.
    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .split(['x', 'X'])
            .enumerate()
            .map(|(i, p)| {
                p.trim().parse::<u64>().map_err(|_| Error::Parse {
                    line: 1,
                    column: i + 1,
                    message: format!("bad cyclic order {p:?} in group spec {s:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        AbelianGroup::new(factors)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(u64::to_string).collect();
        f.write_str(&parts.join("x"))
    }
}

/// `m` characters drawn uniformly from the character group, reproducible
/// from `seed`.
pub fn sample_characters(
    group: &AbelianGroup,
    m: usize,
    seed: u64,
    mode: CharacterSampling,
) -> Result<Vec<Character>> {
    if m == 0 {
        return Err(Error::Range("need at least one character".into()));
    }
    let mut rng = sampling::rng_for(seed, 0);
    match mode {
        CharacterSampling::WithReplacement => {
            Ok((0..m).map(|_| group.random_character(&mut rng)).collect())
        }
        CharacterSampling::WithoutReplacement => {
            let order = usize::try_from(group.order()).map_err(|_| {
                Error::Range("group too large for sampling without replacement".into())
            })?;
            if m > order {
                return Err(Error::Range(format!(
                    "cannot draw {m} distinct characters from a group of order {order}"
                )));
            }
            index::sample(&mut rng, order, m)
                .into_iter()
                .map(|i| group.element_at(i as u128).map(|g| Character(g.0)))
                .collect()
        }
    }
}

/// `(1/m) sum_i chi_i(delta)`, the fingerprint overlap `<h_g|h_{g+delta}>`.
pub fn overlap(
    group: &AbelianGroup,
    chars: &[Character],
    delta: &GroupElement,
) -> Result<Complex64> {
    if chars.is_empty() {
        return Err(Error::Range("need at least one character".into()));
    }
    group.check(&delta.0, "element")?;
    let mut acc = Complex64::new(0.0, 0.0);
    for chi in chars {
        group.check(&chi.0, "character")?;
        acc += group.char_eval_unchecked(chi, delta);
    }
    Ok(acc / chars.len() as f64)
}

/// `max_{delta != 0} |(1/m) sum_i chi_i(delta)|`, i.e. the largest overlap
/// between fingerprints of distinct elements. Brute force over the group.
pub fn max_pairwise_overlap(group: &AbelianGroup, chars: &[Character], budget: u64) -> Result<f64> {
    if group.order() > u128::from(budget) {
        return Err(Error::budget_mc(
            "brute-force overlap",
            group.order(),
            budget,
        ));
    }
    let mut best = 0.0f64;
    for delta in group.elements().skip(1) {
        best = best.max(overlap(group, chars, &delta)?.norm());
    }
    Ok(best.min(1.0))
}

/// Monte Carlo fallback for [`max_pairwise_overlap`]: maximum over `samples`
/// uniformly drawn nonzero differences. A lower bound on the true maximum.
pub fn max_pairwise_overlap_sampled(
    group: &AbelianGroup,
    chars: &[Character],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = sampling::rng_for(seed, 1);
    let mut best = 0.0f64;
    let identity = group.identity();
    for _ in 0..samples {
        let delta = GroupElement(
            group
                .factors
                .iter()
                .map(|&d| rng.random_range(0..d))
                .collect(),
        );
        if delta == identity {
            continue;
        }
        best = best.max(overlap(group, chars, &delta)?.norm());
    }
    Ok(best.min(1.0))
}
