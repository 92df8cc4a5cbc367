//! Brute-force reference computations that share no code with the library.
#![allow(dead_code)]

use std::collections::HashMap;

use num_complex::Complex64;

/// All `s`-subsets of `{0..n}` as bitmasks, by plain recursion.
pub fn subsets(n: usize, s: usize) -> Vec<u64> {
    fn go(start: usize, n: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            if n - i < left {
                break;
            }
            go(i + 1, n, left - 1, acc | 1 << i, out);
        }
    }
    let mut out = Vec::new();
    go(0, n, s, 0, &mut out);
    out
}

pub fn signs(bits: &[bool]) -> Vec<Complex64> {
    bits.iter()
        .map(|&b| Complex64::new(if b { -1.0 } else { 1.0 }, 0.0))
        .collect()
}

pub struct Reference {
    pub success: f64,
    pub fidelity: f64,
    pub rho: Vec<Vec<Complex64>>,
}

/// Tensor `k` subset messages built from per-element factors, keep tuples
/// with exactly one common element `j`, group the survivors by the tuple of
/// leftover sets, and read off the conditional state on `j`.
///
/// `target` is the ideal fingerprint (already normalized).
pub fn tuple_reference(factors: &[Vec<Complex64>], s: usize, target: &[Complex64]) -> Reference {
    let k = factors.len();
    let n = target.len();
    assert!(k * n <= 128, "environment key does not fit");
    let sets = subsets(n, s);
    let messages: Vec<Vec<Complex64>> = factors
        .iter()
        .map(|f| {
            let raw: Vec<Complex64> = sets
                .iter()
                .map(|&a| (0..n).filter(|i| a >> i & 1 == 1).map(|i| f[i]).product())
                .collect();
            let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            raw.into_iter().map(|z| z / norm).collect()
        })
        .collect();

    let mut env: HashMap<u128, Vec<(usize, Complex64)>> = HashMap::new();
    let mut idx = vec![0usize; k];
    'outer: loop {
        let common = idx.iter().fold(u64::MAX, |acc, &i| acc & sets[i]);
        if common.count_ones() == 1 {
            let j = common.trailing_zeros() as usize;
            let mut key = 0u128;
            let mut amp = Complex64::new(1.0, 0.0);
            for (p, &i) in idx.iter().enumerate() {
                key |= u128::from(sets[i] & !common) << (p * n);
                amp *= messages[p][i];
            }
            env.entry(key).or_default().push((j, amp));
        }
        for p in (0..k).rev() {
            idx[p] += 1;
            if idx[p] < sets.len() {
                continue 'outer;
            }
            idx[p] = 0;
        }
        break;
    }

    let success: f64 = env.values().flatten().map(|(_, a)| a.norm_sqr()).sum();
    let mut rho = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut fid = 0.0;
    for col in env.values() {
        let mut proj = Complex64::new(0.0, 0.0);
        for &(j, a) in col {
            proj += target[j].conj() * a;
            for &(l, b) in col {
                rho[j][l] += a * b.conj() / success;
            }
        }
        fid += proj.norm_sqr();
    }
    Reference {
        success,
        fidelity: if success > 0.0 { fid / success } else { 0.0 },
        rho,
    }
}

/// Number of ordered pairs of `s`-subsets meeting in exactly one element.
pub fn single_intersection_pairs(n: usize, s: usize) -> u64 {
    let sets: Vec<u32> = subsets(n, s).into_iter().map(|m| m as u32).collect();
    let mut count = 0u64;
    for &a in &sets {
        count += sets.iter().filter(|&&b| (a & b).count_ones() == 1).count() as u64;
    }
    count
}

/// Fidelity of the two-party construction for many input pairs at once,
/// by walking every leftover pair `(A', B')` of disjoint `(s-1)`-sets and
/// summing the phases of all `j` outside both. Each input is
/// `(x, y, target)` as bitmasks; the phase at `j` is `x_j + y_j + target_j`
/// since the leftover part of the phase drops out of `|.|^2`.
pub fn leftover_fidelities(n: usize, s: usize, inputs: &[(u64, u64, u64)]) -> (u64, Vec<f64>) {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let sets = subsets(n, s - 1);
    let phase_masks: Vec<u64> = inputs.iter().map(|&(x, y, t)| x ^ y ^ t).collect();
    let mut pairs = 0u64;
    let mut sums = vec![0.0f64; inputs.len()];
    for &a in &sets {
        for &b in &sets {
            if a & b != 0 {
                continue;
            }
            let free = full & !(a | b);
            let count = free.count_ones() as i64;
            pairs += count as u64;
            for (sum, &m) in sums.iter_mut().zip(&phase_masks) {
                let t = count - 2 * i64::from((free & m).count_ones());
                *sum += (t * t) as f64;
            }
        }
    }
    let fids = sums
        .iter()
        .map(|&v| v / (n as f64 * pairs as f64))
        .collect();
    (pairs, fids)
}
