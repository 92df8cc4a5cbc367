//! Binary linear codes used to spread input differences before
//! fingerprinting.
//!
//! Codewords are `u64` masks (bit `i` = position `i`), so codeword length is
//! capped at 64. Generator rows are the same masks.

use std::path::Path;

use num_rational::Ratio;
use rand::Rng;

use crate::budget::DEFAULT_CODEWORD_BUDGET;
use crate::fingerprint::BinaryString;
use crate::sampling;
use crate::{Error, Result};

pub const MAX_LENGTH: usize = 64;

/// Name accepted by [`BinaryLinearCode::builtin`].
pub const EXT_HAMMING_8_4: &str = "ext-hamming-8-4";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryLinearCode {
    rows: Vec<u64>,
    n_out: usize,
    distance: usize,
    verified: bool,
}

fn gf2_rank(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in 0..64 {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row >> bit & 1 == 1 {
                *row ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

/// Minimum weight over nonzero combinations of `rows`, walking a Gray code.
/// Stops early once a weight below `floor` shows up.
fn min_weight(rows: &[u64], floor: usize) -> usize {
    let k = rows.len();
    let mut word = 0u64;
    let mut best = usize::MAX;
    for i in 1u64..(1u64 << k) {
        word ^= rows[i.trailing_zeros() as usize];
        let w = word.count_ones() as usize;
        if w < best {
            best = w;
            if best < floor {
                break;
            }
        }
    }
    best
}

fn check_budget(k_in: usize, budget: u64) -> Result<()> {
    if k_in >= 64 || (1u64 << k_in) > budget {
        return Err(Error::budget(
            "codeword enumeration",
            format!("2^{k_in}"),
            budget,
        ));
    }
    Ok(())
}

impl BinaryLinearCode {
    /// Code generated by `rows`, with its minimum distance verified by
    /// enumerating all `2^k_in - 1` nonzero codewords.
    pub fn new(rows: &[BinaryString]) -> Result<Self> {
        Self::with_budget(rows, DEFAULT_CODEWORD_BUDGET)
    }

    pub fn with_budget(rows: &[BinaryString], budget: u64) -> Result<Self> {
        let (masks, n_out) = Self::pack(rows)?;
        check_budget(masks.len(), budget)?;
        let distance = min_weight(&masks, 0);
        Ok(BinaryLinearCode {
            rows: masks,
            n_out,
            distance,
            verified: true,
        })
    }

    /// Code whose distance is a declared, unverified lower bound. For
    /// generators too large to enumerate.
    pub fn with_declared_distance(rows: &[BinaryString], distance: usize) -> Result<Self> {
        let (masks, n_out) = Self::pack(rows)?;
        if distance == 0 || distance > n_out {
            return Err(Error::Range(format!(
                "declared distance {distance} not in [1, {n_out}]"
            )));
        }
        Ok(BinaryLinearCode {
            rows: masks,
            n_out,
            distance,
            verified: false,
        })
    }

    fn pack(rows: &[BinaryString]) -> Result<(Vec<u64>, usize)> {
        let Some(first) = rows.first() else {
            return Err(Error::InvalidInput("generator has no rows".into()));
        };
        let n_out = first.len();
        if n_out > MAX_LENGTH {
            return Err(Error::Range(format!(
                "codeword length {n_out} exceeds {MAX_LENGTH}"
            )));
        }
        let mut masks = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n_out {
                return Err(Error::Shape(format!(
                    "generator row {r} has length {}, expected {n_out}",
                    row.len()
                )));
            }
            masks.push(
                row.bits()
                    .iter()
                    .enumerate()
                    .fold(0u64, |m, (i, &b)| m | (u64::from(b) << i)),
            );
        }
        if gf2_rank(&masks) != masks.len() {
            return Err(Error::InvalidInput(format!(
                "generator rows are linearly dependent (rank {} < {})",
                gf2_rank(&masks),
                masks.len()
            )));
        }
        Ok((masks, n_out))
    }

    fn from_masks(rows: Vec<u64>, n_out: usize) -> Self {
        let distance = min_weight(&rows, 0);
        BinaryLinearCode {
            rows,
            n_out,
            distance,
            verified: true,
        }
    }

    /// The `[8,4,4]` extended Hamming code.
    pub fn extended_hamming_8_4() -> Self {
        let rows = ["10000111", "01001011", "00101101", "00011110"];
        let rows: Vec<BinaryString> = rows.iter().map(|r| r.parse().expect("literal")).collect();
        Self::new(&rows).expect("extended Hamming generator is valid")
    }

    /// `[r,1,r]` repetition code.
    pub fn repetition(r: usize) -> Result<Self> {
        if r == 0 || r > MAX_LENGTH {
            return Err(Error::Range(format!(
                "repetition length {r} not in [1, {MAX_LENGTH}]"
            )));
        }
        Ok(Self::from_masks(vec![u64::MAX >> (64 - r)], r))
    }

    /// `[k,k,1]` code with the identity generator.
    pub fn identity(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_LENGTH {
            return Err(Error::Range(format!(
                "identity size {k} not in [1, {MAX_LENGTH}]"
            )));
        }
        check_budget(k, DEFAULT_CODEWORD_BUDGET)?;
        Ok(Self::from_masks((0..k).map(|i| 1u64 << i).collect(), k))
    }

    /// Resolves `builtin:<name>` specs and generator files.
    pub fn load(spec: &str) -> Result<Self> {
        match spec.strip_prefix("builtin:") {
            Some(name) => Self::builtin(name),
            None => Self::from_file(spec),
        }
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            EXT_HAMMING_8_4 => Ok(Self::extended_hamming_8_4()),
            _ => Err(Error::InvalidInput(format!(
                "unknown builtin code {name:?} (available: {EXT_HAMMING_8_4})"
            ))),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::InvalidInput(format!("cannot read {}: {e}", path.as_ref().display()))
        })?;
        Self::parse(&text)
    }

    /// Parses the generator text format: one row per line, each row a run of
    /// `'0'`/`'1'` characters with no separators. Blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut width: Option<usize> = None;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut bits = Vec::with_capacity(line.len());
            for (col, ch) in line.chars().enumerate() {
                match ch {
                    '0' => bits.push(false),
                    '1' => bits.push(true),
                    _ => {
                        return Err(Error::Parse {
                            line: ln + 1,
                            column: col + 1,
                            message: format!("expected '0' or '1', found {ch:?}"),
                        })
                    }
                }
            }
            match width {
                None => width = Some(bits.len()),
                Some(w) if w != bits.len() => {
                    return Err(Error::Parse {
                        line: ln + 1,
                        column: w.min(bits.len()) + 1,
                        message: format!("row has {} columns, expected {w}", bits.len()),
                    })
                }
                _ => {}
            }
            rows.push(BinaryString::new(bits)?);
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "no generator rows".into(),
            });
        }
        Self::new(&rows)
    }

    /// Generator in the text format accepted by [`BinaryLinearCode::parse`].
    pub fn to_text(&self) -> String {
        self.generator_rows()
            .iter()
            .map(|r| format!("{r}\n"))
            .collect()
    }

    pub fn generator_rows(&self) -> Vec<BinaryString> {
        self.rows
            .iter()
            .map(|&m| BinaryString::from_mask(m, self.n_out).expect("n_out >= 1"))
            .collect()
    }

    pub fn k_in(&self) -> usize {
        self.rows.len()
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// Minimum distance (a declared lower bound when not verified).
    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Relative distance `d / n_out`.
    pub fn lambda(&self) -> Ratio<usize> {
        Ratio::new(self.distance, self.n_out)
    }

    pub fn encode_mask(&self, x: &BinaryString) -> Result<u64> {
        if x.len() != self.k_in() {
            return Err(Error::Shape(format!(
                "message of length {}, code expects {}",
                x.len(),
                self.k_in()
            )));
        }
        Ok(x.bits()
            .iter()
            .zip(&self.rows)
            .filter(|(&b, _)| b)
            .fold(0u64, |acc, (_, &row)| acc ^ row))
    }

    /// `x G` over GF(2).
    pub fn encode(&self, x: &BinaryString) -> Result<BinaryString> {
        BinaryString::from_mask(self.encode_mask(x)?, self.n_out)
    }

    /// Exact minimum nonzero codeword weight.
    pub fn min_distance(&self, budget: u64) -> Result<usize> {
        check_budget(self.k_in(), budget)?;
        Ok(min_weight(&self.rows, 0))
    }

    /// Every nonzero codeword as a mask, in Gray-code order.
    pub fn nonzero_codewords(&self, budget: u64) -> Result<Vec<u64>> {
        check_budget(self.k_in(), budget)?;
        let mut word = 0u64;
        Ok((1u64..(1u64 << self.k_in()))
            .map(|i| {
                word ^= self.rows[i.trailing_zeros() as usize];
                word
            })
            .collect())
    }

    /// Largest codeword weight.
    pub fn max_weight(&self, budget: u64) -> Result<usize> {
        Ok(self
            .nonzero_codewords(budget)?
            .iter()
            .map(|w| w.count_ones() as usize)
            .max()
            .unwrap_or(0))
    }

    /// The same code with `extra` zero positions appended to every codeword.
    pub fn zero_padded(&self, extra: usize) -> Result<Self> {
        let n_out = self.n_out + extra;
        if n_out > MAX_LENGTH {
            return Err(Error::Range(format!(
                "padded length {n_out} exceeds {MAX_LENGTH}"
            )));
        }
        Ok(BinaryLinearCode {
            rows: self.rows.clone(),
            n_out,
            distance: self.distance,
            verified: self.verified,
        })
    }
}

/// Rejection-samples full-rank `k_in x n_out` generators until one has
/// verified minimum distance `>= target_distance`.
pub fn random_code(
    n_out: usize,
    k_in: usize,
    target_distance: usize,
    seed: u64,
    max_tries: usize,
) -> Result<BinaryLinearCode> {
    if n_out == 0 || n_out > MAX_LENGTH || k_in == 0 || k_in > n_out {
        return Err(Error::Range(format!(
            "need 1 <= k_in <= n_out <= {MAX_LENGTH} (k_in={k_in}, n_out={n_out})"
        )));
    }
    check_budget(k_in, DEFAULT_CODEWORD_BUDGET)?;
    let mut rng = sampling::rng_for(seed, 0);
    let full = u64::MAX >> (64 - n_out);
    let mut best = 0;
    for _ in 0..max_tries {
        let rows: Vec<u64> = (0..k_in).map(|_| rng.random::<u64>() & full).collect();
        if gf2_rank(&rows) != k_in {
            continue;
        }
        let d = min_weight(&rows, target_distance);
        best = best.max(d);
        if d >= target_distance {
            return Ok(BinaryLinearCode::from_masks(rows, n_out));
        }
    }
    Err(Error::ConstructionFailure {
        target: target_distance,
        tries: max_tries,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_for;

    fn bits(s: &str) -> BinaryString {
        s.parse().unwrap()
    }

    #[test]
    fn extended_hamming_parameters() {
        let c = BinaryLinearCode::extended_hamming_8_4();
        assert_eq!((c.k_in(), c.n_out(), c.distance()), (4, 8, 4));
        assert_eq!(c.min_distance(1 << 20).unwrap(), 4);
        assert_eq!(c.lambda(), Ratio::new(1, 2));
        assert_eq!(c.encode(&bits("1000")).unwrap().weight(), 4);
        assert_eq!(
            c.encode(&bits("0000")).unwrap(),
            BinaryString::zeros(8).unwrap()
        );
        // brute-force weight table: 1 + 14 z^4 + z^8
        let mut table = [0usize; 9];
        for m in 0u64..16 {
            let w = c
                .encode(&BinaryString::from_mask(m, 4).unwrap())
                .unwrap()
                .weight();
            table[w] += 1;
        }
        assert_eq!(table, [1, 0, 0, 0, 14, 0, 0, 0, 1]);
        assert_eq!(c.max_weight(1 << 20).unwrap(), 8);
    }

    #[test]
    fn simple_families() {
        assert_eq!(BinaryLinearCode::repetition(7).unwrap().distance(), 7);
        assert_eq!(BinaryLinearCode::identity(5).unwrap().distance(), 1);
        assert_eq!(BinaryLinearCode::repetition(64).unwrap().distance(), 64);
    }

    #[test]
    fn encode_is_linear() {
        let c = random_code(20, 6, 5, 3, 10_000).unwrap();
        let mut rng = rng_for(31, 0);
        for _ in 0..100 {
            let x = BinaryString::random(6, &mut rng).unwrap();
            let y = BinaryString::random(6, &mut rng).unwrap();
            let lhs = c.encode(&x).unwrap().xor(&c.encode(&y).unwrap()).unwrap();
            assert_eq!(lhs, c.encode(&x.xor(&y).unwrap()).unwrap());
        }
    }

    #[test]
    fn distinct_codewords_are_far_apart() {
        let c = random_code(24, 6, 7, 8, 10_000).unwrap();
        let mut rng = rng_for(32, 0);
        for _ in 0..100 {
            let x = BinaryString::random(6, &mut rng).unwrap();
            let y = BinaryString::random(6, &mut rng).unwrap();
            if x != y {
                let d = c
                    .encode(&x)
                    .unwrap()
                    .hamming(&c.encode(&y).unwrap())
                    .unwrap();
                assert!(d >= c.distance());
            }
        }
    }

    #[test]
    fn random_code_meets_target() {
        for seed in 0..5 {
            let c = random_code(16, 4, 6, seed, 10_000).unwrap();
            assert!(c.is_verified());
            assert!(c.min_distance(1 << 20).unwrap() >= 6);
            assert_eq!(gf2_rank(&c.rows), 4);
        }
    }

    #[test]
    fn impossible_target_fails() {
        let err = random_code(8, 2, 8, 1, 500).unwrap_err();
        assert!(matches!(err, Error::ConstructionFailure { target: 8, best, .. } if best < 8));
    }

    #[test]
    fn encode_checks_length() {
        let c = BinaryLinearCode::extended_hamming_8_4();
        assert!(matches!(c.encode(&bits("101")), Err(Error::Shape(_))));
    }

    #[test]
    fn generator_text_format() {
        let c = BinaryLinearCode::extended_hamming_8_4();
        let parsed = BinaryLinearCode::parse(&c.to_text()).unwrap();
        assert_eq!(parsed, c);
        let err = BinaryLinearCode::parse("1100\n10x0\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                column: 3,
                message: "expected '0' or '1', found 'x'".into()
            }
        );
        assert!(matches!(
            BinaryLinearCode::parse("1100\n101\n"),
            Err(Error::Parse {
                line: 2,
                column: 4,
                ..
            })
        ));
        assert!(BinaryLinearCode::parse("\n\n").is_err());
        assert!(BinaryLinearCode::parse("1100\n1100\n").is_err());
    }

    #[test]
    fn load_builtin_and_file() {
        assert_eq!(
            BinaryLinearCode::load("builtin:ext-hamming-8-4").unwrap(),
            BinaryLinearCode::extended_hamming_8_4()
        );
        assert!(BinaryLinearCode::load("builtin:nope").is_err());
        let dir = std::env::temp_dir().join(format!("qfp-code-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rep.txt");
        std::fs::write(&path, "11111\n").unwrap();
        assert_eq!(
            BinaryLinearCode::load(path.to_str().unwrap())
                .unwrap()
                .distance(),
            5
        );
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn budget_and_declared_distance() {
        let rows: Vec<BinaryString> = (0..30)
            .map(|i| BinaryString::from_mask(1 << i | 1 << 30, 31).unwrap())
            .collect();
        assert!(matches!(
            BinaryLinearCode::new(&rows),
            Err(Error::BudgetExceeded { .. })
        ));
        let c = BinaryLinearCode::with_declared_distance(&rows, 2).unwrap();
        assert!(!c.is_verified());
        assert!(c.min_distance(1 << 20).is_err());
    }

    #[test]
    fn zero_padding_keeps_distance() {
        let c = BinaryLinearCode::extended_hamming_8_4()
            .zero_padded(8)
            .unwrap();
        assert_eq!((c.n_out(), c.distance()), (16, 4));
        assert_eq!(c.min_distance(1 << 20).unwrap(), 4);
        assert_eq!(c.lambda(), Ratio::new(1, 4));
        assert_eq!(
            c.encode(&bits("1111")).unwrap().to_string(),
            "1111111100000000"
        );
    }
}
