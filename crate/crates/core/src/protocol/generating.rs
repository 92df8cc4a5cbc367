//! Two-party construction evaluated with generating polynomials.
//!
//! After a successful projection the joint amplitude of `|j>|A'>|B'>` is
//! `u_j a(A') b(B')` with `u_j = alpha_j beta_j`, `a(A') = prod_{A'} alpha`,
//! `b(B') = prod_{B'} beta`, for pairwise disjoint `{j}, A', B'` with
//! `|A'| = |B'| = s - 1`. Hence
//!
//! ```text
//! rho_jk = u_j conj(u_k) V_jk / N,
//! V_jk   = [X^{s-1} Y^{s-1}] prod_{i != j,k} (1 + |alpha_i|^2 X + |beta_i|^2 Y),
//! N      = sum_j |u_j|^2 V_jj,
//! ```
//!
//! and the success probability is `N / (e_s(|alpha|^2) e_s(|beta|^2))`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fingerprint::elementary_symmetric;
use crate::quantum::{DensityMatrix, StateVector};
use crate::{Error, Result};

use super::Construction;

/// `[X^m Y^m] prod_{i not in skip} (1 + a_i X + b_i Y)`.
fn env_weight(a: &[f64], b: &[f64], m: usize, skip: (usize, usize)) -> f64 {
    let w = m + 1;
    let mut poly = vec![0.0; w * w];
    poly[0] = 1.0;
    for i in 0..a.len() {
        if i == skip.0 || i == skip.1 {
            continue;
        }
        for x in (0..w).rev() {
            for y in (0..w).rev() {
                let mut v = poly[x * w + y];
                if x > 0 {
                    v += a[i] * poly[(x - 1) * w + y];
                }
                if y > 0 {
                    v += b[i] * poly[x * w + y - 1];
                }
                poly[x * w + y] = v;
            }
        }
    }
    poly[m * w + m]
}

pub fn construct(
    alice: &[Complex64],
    bob: &[Complex64],
    s: usize,
    target: &StateVector,
    with_state: bool,
) -> Result<Construction> {
    let n = alice.len();
    if bob.len() != n || target.dim() != n {
        return Err(Error::Shape(format!(
            "factor lengths {} / {} with target dimension {}",
            n,
            bob.len(),
            target.dim()
        )));
    }
    if s == 0 || s > n {
        return Err(Error::Range(format!("subset size {s} not in [1, {n}]")));
    }
    let a: Vec<f64> = alice.iter().map(|z| z.norm_sqr()).collect();
    let b: Vec<f64> = bob.iter().map(|z| z.norm_sqr()).collect();
    let norm_alice = elementary_symmetric(&a, s);
    let norm_bob = elementary_symmetric(&b, s);
    if norm_alice == 0.0 || norm_bob == 0.0 {
        return Err(Error::InvalidInput("a message has zero norm".into()));
    }

    let m = s - 1;
    let mut v = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let w = env_weight(&a, &b, m, (j, k));
            v[(j, k)] = w;
            v[(k, j)] = w;
        }
    }
    let u: Vec<Complex64> = alice.iter().zip(bob).map(|(x, y)| x * y).collect();
    let total: f64 = (0..n).map(|j| u[j].norm_sqr() * v[(j, j)]).sum();
    if total == 0.0 {
        return Ok(Construction::failed());
    }
    let success_probability = total / (norm_alice * norm_bob);

    let t = target.amplitudes();
    let coeff: Vec<Complex64> = (0..n).map(|j| t[j].conj() * u[j]).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            acc += coeff[j] * coeff[k].conj() * v[(j, k)];
        }
    }
    let fidelity = acc.re / total;

    let reduced_state = with_state.then(|| {
        let rho = DMatrix::from_fn(n, n, |j, k| u[j] * u[k].conj() * (v[(j, k)] / total));
        DensityMatrix::trusted(rho)
    });
    Ok(Construction {
        success_probability,
        fidelity: Some(fidelity),
        reduced_state,
    })
}
