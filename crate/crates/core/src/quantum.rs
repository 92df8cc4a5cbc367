//! Dense pure states and density matrices.
//!
//! Only what the protocols need: overlaps, projective post-selection,
//! partial traces over a trailing register, and the SWAP-test acceptance
//! statistic `(1 + Tr(rho sigma)) / 2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Normalization tolerance for states and traces.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance for derived numerical assertions (eigenvalues, fidelities).
pub const ASSERT_TOL: f64 = 1e-9;

/// Amplitudes over a tensor product of registers with dimensions `dims`.
///
/// The first register is the most significant: index `(i, j)` of a two
/// register state lives at `i * dims[1] + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    dims: Vec<usize>,
    normalized: bool,
}

impl StateVector {
    /// Wraps raw amplitudes. The state is marked normalized iff its squared
    /// norm is within [`NORM_TOL`] of one.
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || total != amplitudes.len() {
            return Err(Error::Shape(format!(
                "{} amplitudes for register dims {:?}",
                amplitudes.len(),
                dims
            )));
        }
        let normalized = (norm_sqr(&amplitudes) - 1.0).abs() <= NORM_TOL;
        Ok(StateVector {
            amplitudes,
            dims,
            normalized,
        })
    }

    /// Single-register state.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let d = amplitudes.len();
        Self::new(amplitudes, vec![d])
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(amplitudes, dims)
    }

    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Range(format!(
                "basis index {index} not in [0, {dim})"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(amps, vec![dim])
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            amps.extend(other.amplitudes.iter().map(|b| a * b));
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        StateVector::new(amps, dims).expect("tensor dims match amplitude count")
    }

    /// Same amplitudes viewed as a different register split.
    pub fn reshape(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(self.amplitudes, dims)
    }

    fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr()))
        }
    }
}

/// Neumaier-compensated sum. Joint states have millions of equal tiny
/// terms, where plain accumulation drifts by ~1e-11.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

fn compensated_complex_sum(values: impl Iterator<Item = Complex64> + Clone) -> Complex64 {
    Complex64::new(
        compensated_sum(values.clone().map(|z| z.re)),
        compensated_sum(values.map(|z| z.im)),
    )
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    compensated_sum(a.iter().map(|z| z.norm_sqr()))
}

/// `<u|v>`, conjugating `u`.
pub fn inner_product(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(Error::Shape(format!(
            "inner product of dimensions {} and {}",
            u.dim(),
            v.dim()
        )));
    }
    Ok(compensated_complex_sum(
        u.amplitudes
            .iter()
            .zip(&v.amplitudes)
            .map(|(a, b)| a.conj() * b),
    ))
}

/// Result of a two-outcome projective measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub probability: f64,
    /// Renormalized post-measurement state, `None` when the kept subspace has
    /// zero weight.
    pub post_state: Option<StateVector>,
}

/// Projects onto the span of the basis states for which `keep` holds.
pub fn project<F>(state: &StateVector, keep: F) -> Result<Projection>
where
    F: Fn(usize) -> bool,
{
    state.require_normalized()?;
    let mut amps = state.amplitudes.clone();
    for (i, a) in amps.iter_mut().enumerate() {
        if !keep(i) {
            *a = Complex64::new(0.0, 0.0);
        }
    }
    let probability = norm_sqr(&amps);
    if probability == 0.0 {
        return Ok(Projection {
            probability,
            post_state: None,
        });
    }
    let scale = probability.sqrt();
    amps.iter_mut().for_each(|a| *a /= scale);
    Ok(Projection {
        probability,
        post_state: Some(StateVector::new(amps, state.dims.clone())?),
    })
}

fn split(joint: &StateVector, first: usize) -> Result<usize> {
    if first == 0 || !joint.dim().is_multiple_of(first) {
        return Err(Error::Shape(format!(
            "cannot split dimension {} with a first register of {first}",
            joint.dim()
        )));
    }
    Ok(joint.dim() / first)
}

/// `<t| Tr_2(|joint><joint|) |t>` where the first register has dimension
/// `first_register_dim`.
///
/// Computed as `sum_e |(<t| ⊗ <e|) |joint>|^2`; only one environment-sized
/// vector is held, never the environment operator.
pub fn reduced_fidelity(
    joint: &StateVector,
    target: &StateVector,
    first_register_dim: usize,
) -> Result<f64> {
    let env = split(joint, first_register_dim)?;
    if target.dim() != first_register_dim {
        return Err(Error::Shape(format!(
            "target of dimension {} against a first register of {first_register_dim}",
            target.dim()
        )));
    }
    joint.require_normalized()?;
    target.require_normalized()?;
    let mut acc = vec![Complex64::new(0.0, 0.0); env];
    for (j, t) in target.amplitudes.iter().enumerate() {
        let tc = t.conj();
        if tc == Complex64::new(0.0, 0.0) {
            continue;
        }
        let row = &joint.amplitudes[j * env..(j + 1) * env];
        acc.iter_mut().zip(row).for_each(|(a, x)| *a += tc * x);
    }
    Ok(norm_sqr(&acc))
}

/// Reduced state of the first register.
pub fn reduced_density(joint: &StateVector, first_register_dim: usize) -> Result<DensityMatrix> {
    let env = split(joint, first_register_dim)?;
    joint.require_normalized()?;
    let d = first_register_dim;
    let rows: Vec<&[Complex64]> = (0..d)
        .map(|j| &joint.amplitudes[j * env..(j + 1) * env])
        .collect();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for j in 0..d {
        for k in j..d {
            let v = compensated_complex_sum(rows[j].iter().zip(rows[k]).map(|(a, b)| a * b.conj()));
            m[(j, k)] = v;
            m[(k, j)] = v.conj();
        }
    }
    DensityMatrix::new(m)
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::Shape(format!(
                "density matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let d = entries.nrows();
        for j in 0..d {
            for k in j..d {
                if (entries[(j, k)] - entries[(k, j)].conj()).norm() > NORM_TOL {
                    return Err(Error::Invariant(format!("not Hermitian at ({j}, {k})")));
                }
            }
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::Invariant(format!("trace {tr} is not 1")));
        }
        let min_eig = entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -ASSERT_TOL {
            return Err(Error::Invariant(format!("negative eigenvalue {min_eig}")));
        }
        Ok(DensityMatrix { entries })
    }

    /// Builds a matrix known to satisfy the invariants by construction
    /// (checked in debug builds).
    pub(crate) fn trusted(entries: DMatrix<Complex64>) -> Self {
        debug_assert!(Self::new(entries.clone()).is_ok());
        DensityMatrix { entries }
    }

    /// `|psi><psi|`.
    pub fn pure(state: &StateVector) -> Result<Self> {
        state.require_normalized()?;
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("empty register".into()));
        }
        Self::new(DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `<psi|rho|psi>`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "state of dimension {} against a {}-dimensional density matrix",
                state.dim(),
                self.dim()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Ok((v.adjoint() * &self.entries * &v)[(0, 0)].re)
    }

    /// `Tr(rho sigma)`.
    pub fn overlap(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "density matrices of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        // Tr(AB) = sum_jk A_jk B_kj
        let a = &self.entries;
        let b = &other.entries;
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..d {
            for k in 0..d {
                acc += a[(j, k)] * b[(k, j)];
            }
        }
        Ok(acc.re)
    }

    pub fn purity(&self) -> f64 {
        self.overlap(self).expect("same dimension")
    }

    /// `D rho D^dagger` for a diagonal unitary `D = diag(phases)`.
    pub fn conjugate_diagonal(&self, phases: &[Complex64]) -> Result<Self> {
        if phases.len() != self.dim() {
            return Err(Error::Shape(format!(
                "{} phases for a {}-dimensional density matrix",
                phases.len(),
                self.dim()
            )));
        }
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |j, k| {
            phases[j] * self.entries[(j, k)] * phases[k].conj()
        });
        Ok(DensityMatrix { entries: m })
    }
}

/// Acceptance probability of the SWAP test on `rho ⊗ sigma`.
pub fn swap_test_accept(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok((1.0 + rho.overlap(sigma)?) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(seed: u64, dims: Vec<usize>) -> StateVector {
        use rand::Rng;
        let mut rng = crate::sampling::rng_for(seed, 99);
        let total: usize = dims.iter().product();
        let amps = (0..total)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        StateVector::normalized(amps, dims).unwrap()
    }

    #[test]
    fn shape_is_checked() {
        assert!(StateVector::new(vec![c(1.0, 0.0); 5], vec![2, 3]).is_err());
        let u = StateVector::basis_state(2, 0).unwrap();
        let v = StateVector::basis_state(3, 0).unwrap();
        assert!(matches!(inner_product(&u, &v), Err(Error::Shape(_))));
    }

    #[test]
    fn normalization_flag() {
        let s = StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)], vec![2]).unwrap();
        assert!(!s.is_normalized());
        assert!(matches!(
            project(&s, |_| true),
            Err(Error::NotNormalized(_))
        ));
        let s = StateVector::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)], vec![2]).unwrap();
        assert!(s.is_normalized());
    }

    #[test]
    fn self_overlap_is_one() {
        let u = random_state(1, vec![7]);
        assert_abs_diff_eq!(inner_product(&u, &u).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_extremes() {
        let u = random_state(2, vec![6]);
        let all = project(&u, |_| true).unwrap();
        assert_abs_diff_eq!(all.probability, 1.0, epsilon = 1e-12);
        let post = all.post_state.unwrap();
        for (a, b) in post.amplitudes().iter().zip(u.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
        let none = project(&u, |_| false).unwrap();
        assert_eq!(none.probability, 0.0);
        assert!(none.post_state.is_none());
    }

    #[test]
    fn product_state_has_unit_fidelity() {
        let t = random_state(3, vec![4]);
        let e = random_state(4, vec![9]);
        let joint = t.tensor(&e);
        assert_abs_diff_eq!(
            reduced_fidelity(&joint, &t, 4).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let rho = reduced_density(&joint, 4).unwrap();
        let pure = DensityMatrix::pure(&t).unwrap();
        assert_abs_diff_eq!(
            (rho.entries() - pure.entries()).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn orthogonal_first_register_has_zero_fidelity() {
        let t = StateVector::basis_state(3, 0).unwrap();
        let perp = StateVector::basis_state(3, 2).unwrap();
        let joint = perp.tensor(&random_state(5, vec![4]));
        assert_abs_diff_eq!(
            reduced_fidelity(&joint, &t, 3).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(
            vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
            vec![2, 2],
        )
        .unwrap();
        let rho = reduced_density(&bell, 2).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_abs_diff_eq!(
            (rho.entries() - mixed.entries()).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(rho.purity(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn swap_test_extremes() {
        let u = random_state(6, vec![5]);
        let rho = DensityMatrix::pure(&u).unwrap();
        assert_abs_diff_eq!(swap_test_accept(&rho, &rho).unwrap(), 1.0, epsilon = 1e-12);
        let a = DensityMatrix::pure(&StateVector::basis_state(5, 0).unwrap()).unwrap();
        let b = DensityMatrix::pure(&StateVector::basis_state(5, 3).unwrap()).unwrap();
        assert_abs_diff_eq!(swap_test_accept(&a, &b).unwrap(), 0.5, epsilon = 1e-15);
        let m = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(matches!(swap_test_accept(&a, &m), Err(Error::Shape(_))));
    }

    #[test]
    fn invalid_density_matrices_rejected() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = c(1.5, 0.0);
        m[(1, 1)] = c(-0.5, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::Invariant(_))));
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = c(0.5, 0.0);
        m[(1, 1)] = c(0.5, 0.0);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::Invariant(_))));
    }

    #[test]
    fn projection_then_partial_trace_keeps_unit_trace() {
        let joint = random_state(7, vec![5, 6]);
        let post = project(&joint, |i| i % 3 != 0).unwrap().post_state.unwrap();
        let rho = reduced_density(&post, 5).unwrap();
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = NORM_TOL);
    }

    proptest! {
        #[test]
        fn fidelity_matches_reduced_density(seed in any::<u64>(), d1 in 1usize..=8, d2 in 1usize..=8) {
            let joint = random_state(seed, vec![d1, d2]);
            let target = random_state(seed ^ 0xABCD, vec![d1]);
            let f = reduced_fidelity(&joint, &target, d1).unwrap();
            let rho = reduced_density(&joint, d1).unwrap();
            prop_assert!((f - rho.expectation(&target).unwrap()).abs() <= ASSERT_TOL);
            prop_assert!((-ASSERT_TOL..=1.0 + NORM_TOL).contains(&f));
        }

        #[test]
        fn swap_test_is_symmetric(seed in any::<u64>(), d in 1usize..=6, e in 1usize..=6) {
            let rho = reduced_density(&random_state(seed, vec![d, e]), d).unwrap();
            let sigma = reduced_density(&random_state(seed.wrapping_add(1), vec![d, e]), d).unwrap();
            let ab = swap_test_accept(&rho, &sigma).unwrap();
            let ba = swap_test_accept(&sigma, &rho).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12);
            prop_assert!((0.5 - ASSERT_TOL..=1.0 + ASSERT_TOL).contains(&ab));
        }

        #[test]
        fn cauchy_schwarz(seed in any::<u64>(), d in 1usize..=16) {
            let u = random_state(seed, vec![d]);
            let v = random_state(seed.wrapping_mul(3), vec![d]);
            prop_assert!(inner_product(&u, &v).unwrap().norm() <= 1.0 + NORM_TOL);
        }
    }
}
