//! Relational amplitude matrices.
//!
//! A [`RelationalMatrix`] holds `R_ij`, the amplitude relating system
//! eigenstate `|s_i>` to apparatus eigenstate `|a_j>`. The matrix is stored
//! normalized (`sum |R_ij|^2 = 1`); the squared norm it had before the most
//! recent normalization is kept as [`RelationalMatrix::weight`], which is the
//! outcome probability when the producing map was a projection.
//!
//! Both eigenbases are fixed at construction. A change of basis is an explicit
//! [`RelationalMatrix::apply_local_pair`] with unitaries.

use crate::error::{shape_err, Error, Result};
use crate::io::MatrixJson;
use crate::linalg::{self, ComplexMatrix, ComplexVector, C64};
use crate::policy::NumericPolicy;
use serde::{Deserialize, Serialize};

/// Row sums whose norm falls below this are treated as a vanishing wave
/// function, in which case the leading singular vector is used instead.
const WAVE_FUNCTION_SUM_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct RelationalMatrix {
    r: ComplexMatrix,
    weight: f64,
    labels: Option<BasisLabels>,
}

/// Optional names for the system rows and apparatus columns.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisLabels {
    pub system: Vec<String>,
    pub apparatus: Vec<String>,
}

impl RelationalMatrix {
    /// Normalizes `r` and records its squared norm as the weight.
    pub fn new(r: ComplexMatrix) -> Result<Self> {
        Self::normalize(r, &NumericPolicy::DEFAULT, None)
    }

    fn normalize(r: ComplexMatrix, policy: &NumericPolicy, outcome: Option<usize>) -> Result<Self> {
        let weight = r.frobenius_norm().powi(2);
        if !(weight > policy.min_probability) {
            return Err(match outcome {
                Some(_) => Error::ImpossibleOutcome {
                    outcome,
                    probability: weight,
                },
                None if weight == 0.0 => Error::Contract("relational matrix is identically zero".into()),
                None => Error::ImpossibleOutcome {
                    outcome,
                    probability: weight,
                },
            });
        }
        let r = r.scale(C64::new(1.0 / weight.sqrt(), 0.0));
        Ok(Self { r, weight, labels: None })
    }

    /// `R_ij = c_i d_j`, normalized.
    pub fn from_product(c: &ComplexVector, d: &ComplexVector) -> Result<Self> {
        if c.norm() == 0.0 || d.norm() == 0.0 {
            return Err(Error::Contract("from_product requires nonzero factors".into()));
        }
        let r = ComplexMatrix::from_fn(c.dim(), d.dim(), |i, j| c.get(i) * d.get(j));
        Self::new(r)
    }

    /// Reshapes a composite state vector; amplitude `i * M + j` becomes `R_ij`.
    pub fn from_state(psi: &PureCompositeState) -> Self {
        let m = psi.dim_a;
        let r = ComplexMatrix::from_fn(psi.dim_s, m, |i, j| psi.amplitudes.get(i * m + j));
        Self::new(r).expect("unit-norm state reshapes to a nonzero matrix")
    }

    /// `diag(1, ..., 1) / sqrt(n)`: the maximally entangled `n x n` relation.
    pub fn maximally_entangled(n: usize) -> Self {
        Self::new(ComplexMatrix::diag_real(&vec![1.0; n])).expect("nonzero")
    }

    pub fn with_labels(mut self, system: Vec<String>, apparatus: Vec<String>) -> Result<Self> {
        if system.len() != self.n() || apparatus.len() != self.m() {
            return Err(shape_err(
                "with_labels",
                format!("{} system and {} apparatus labels", self.n(), self.m()),
                format!("{} and {}", system.len(), apparatus.len()),
            ));
        }
        self.labels = Some(BasisLabels { system, apparatus });
        Ok(self)
    }

    pub fn labels(&self) -> Option<&BasisLabels> {
        self.labels.as_ref()
    }

    /// Dimension of the system eigenbasis.
    pub fn n(&self) -> usize {
        self.r.rows()
    }

    /// Dimension of the apparatus eigenbasis.
    pub fn m(&self) -> usize {
        self.r.cols()
    }

    /// The normalized amplitudes.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.r
    }

    /// Squared norm before the last normalization.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `sqrt(weight) * R`: the carrier as produced by the last map.
    pub fn unnormalized(&self) -> ComplexMatrix {
        self.r.scale(C64::new(self.weight.sqrt(), 0.0))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.r.get(i, j)
    }

    fn derived(&self, r: ComplexMatrix, policy: &NumericPolicy, outcome: Option<usize>) -> Result<Self> {
        let mut out = Self::normalize(r, policy, outcome)?;
        out.labels = self.labels.clone();
        Ok(out)
    }

    /// Wave function `phi_i = sum_j R_ij`, renormalized.
    ///
    /// Only defined when `R` factorizes. If the row sums vanish (the apparatus
    /// factor `d` sums to zero) the leading left singular vector, which is
    /// `c` up to a phase, is returned instead.
    pub fn wave_function(&self) -> Result<ComplexVector> {
        self.wave_function_with(&NumericPolicy::DEFAULT)
    }

    pub fn wave_function_with(&self, policy: &NumericPolicy) -> Result<ComplexVector> {
        if !self.is_product_with(policy.rank_tol, policy)? {
            return Err(Error::Precondition(
                "wave function requires an unentangled relational matrix (R_ij = c_i d_j); \
                 use reduced_density for entangled relations"
                    .into(),
            ));
        }
        let phi = ComplexVector::new((0..self.n()).map(|i| (0..self.m()).map(|j| self.r.get(i, j)).sum()).collect())?;
        if phi.norm() >= WAVE_FUNCTION_SUM_FLOOR {
            return phi.normalized();
        }
        let dec = linalg::svd_with(&self.r, policy)?;
        Ok(dec.u.column(0).fix_phase(1e-12))
    }

    /// `p_i = sum_j |R_ij|^2`.
    pub fn event_probability(&self, i: usize) -> Result<f64> {
        if i >= self.n() {
            return Err(Error::Contract(format!("system index {i} out of range (N = {})", self.n())));
        }
        Ok((0..self.m()).map(|j| self.r.get(i, j).norm_sqr()).sum())
    }

    /// `p_j^A = sum_i |R_ij|^2`.
    pub fn apparatus_probability(&self, j: usize) -> Result<f64> {
        if j >= self.m() {
            return Err(Error::Contract(format!("apparatus index {j} out of range (M = {})", self.m())));
        }
        Ok((0..self.n()).map(|i| self.r.get(i, j).norm_sqr()).sum())
    }

    pub fn event_probabilities(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.event_probability(i).expect("in range")).collect()
    }

    pub fn apparatus_probabilities(&self) -> Vec<f64> {
        (0..self.m()).map(|j| self.apparatus_probability(j).expect("in range")).collect()
    }

    /// `rho_S = R R^dagger`.
    pub fn reduced_density(&self) -> ComplexMatrix {
        &self.r * &self.r.adjoint()
    }

    /// `rho_A = (R^dagger R)^T`, the apparatus-side reduced density in the `{|a_j>}` basis.
    pub fn apparatus_density(&self) -> ComplexMatrix {
        (&self.r.adjoint() * &self.r).transpose()
    }

    /// True iff the second singular value is below `tol * sigma_max`.
    pub fn is_product(&self, tol: f64) -> bool {
        self.is_product_with(tol, &NumericPolicy::DEFAULT)
            .expect("svd of a desk-scale matrix converges")
    }

    pub fn is_product_with(&self, tol: f64, policy: &NumericPolicy) -> Result<bool> {
        if !(tol > 0.0) {
            return Err(Error::Contract("product-test tolerance must be positive".into()));
        }
        if self.n() == 1 || self.m() == 1 {
            return Ok(true);
        }
        let dec = linalg::svd_with(&self.r, policy)?;
        Ok(dec.sigma[1] < tol * dec.sigma[0])
    }

    /// `R_new = M R`, renormalized; the weight records `||M R||^2`.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> Result<Self> {
        if m.shape() != (self.n(), self.n()) {
            return Err(shape_err(
                "apply_operator",
                format!("{0}x{0}", self.n()),
                format!("{}x{}", m.rows(), m.cols()),
            ));
        }
        self.derived(m * &self.r, &NumericPolicy::DEFAULT, None)
    }

    /// `R' = Q R O^T`: the action of `Q ⊗ O` on the composite state.
    pub fn apply_local_pair(&self, q: &ComplexMatrix, o: &ComplexMatrix) -> Result<Self> {
        self.apply_local_pair_raw(q, o)
            .and_then(|r| self.derived(r, &NumericPolicy::DEFAULT, None))
    }

    /// Like [`apply_local_pair`](Self::apply_local_pair), tagging a vanishing
    /// result as an impossible outcome `m`.
    pub(crate) fn apply_local_pair_outcome(&self, q: &ComplexMatrix, o: &ComplexMatrix, m: usize, policy: &NumericPolicy) -> Result<Self> {
        let r = self.apply_local_pair_raw(q, o)?;
        self.derived(r, policy, Some(m))
    }

    fn apply_local_pair_raw(&self, q: &ComplexMatrix, o: &ComplexMatrix) -> Result<ComplexMatrix> {
        if q.shape() != (self.n(), self.n()) || o.shape() != (self.m(), self.m()) {
            return Err(shape_err(
                "apply_local_pair",
                format!("Q {0}x{0}, O {1}x{1}", self.n(), self.m()),
                format!("Q {}x{}, O {}x{}", q.rows(), q.cols(), o.rows(), o.cols()),
            ));
        }
        Ok(&(q * &self.r) * &o.transpose())
    }

    /// Schmidt form `R = u_s · diag(lambda) · v_a`.
    pub fn schmidt(&self) -> Result<SchmidtForm> {
        let dec = linalg::svd(&self.r)?;
        Ok(SchmidtForm {
            u_s: dec.u,
            coefficients: dec.sigma,
            v_a: dec.v,
        })
    }

    /// `|Psi> = sum_ij R_ij |s_i>|a_j>`.
    pub fn to_state_vector(&self) -> PureCompositeState {
        let amps = ComplexVector::new(self.r.row_major()).expect("finite");
        PureCompositeState {
            amplitudes: amps,
            dim_s: self.n(),
            dim_a: self.m(),
        }
    }
}

/// Schmidt decomposition of a relational matrix.
#[derive(Clone, Debug)]
pub struct SchmidtForm {
    /// `N x N` unitary; column `i` is the system Schmidt vector.
    pub u_s: ComplexMatrix,
    /// Nonnegative, descending, `min(N, M)` entries.
    pub coefficients: Vec<f64>,
    /// `M x M` unitary; row `i` holds the apparatus Schmidt vector's amplitudes.
    pub v_a: ComplexMatrix,
}

impl SchmidtForm {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::rect_diag(self.u_s.cols(), self.v_a.rows(), &self.coefficients);
        &(&self.u_s * &d) * &self.v_a
    }

    /// `lambda_i^2`, the reduced-density spectrum.
    pub fn squared(&self) -> Vec<f64> {
        self.coefficients.iter().map(|l| l * l).collect()
    }

    /// Schmidt rank at relative tolerance `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        let max = self.coefficients.first().copied().unwrap_or(0.0);
        self.coefficients.iter().filter(|&&l| l > tol * max).count()
    }

    /// `|s~_i>` as a vector in the `{|s_k>}` basis.
    pub fn system_vector(&self, i: usize) -> ComplexVector {
        self.u_s.column(i)
    }

    /// `|a~_i>` as a vector in the `{|a_l>}` basis.
    pub fn apparatus_vector(&self, i: usize) -> ComplexVector {
        self.v_a.row(i)
    }
}

/// Pure state of `S ⊗ A`, amplitude index `i * dim_a + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureCompositeState {
    amplitudes: ComplexVector,
    dim_s: usize,
    dim_a: usize,
}

impl PureCompositeState {
    /// Validates dimensions and unit norm.
    pub fn new(amplitudes: ComplexVector, dim_s: usize, dim_a: usize) -> Result<Self> {
        if dim_s == 0 || dim_a == 0 || dim_s.checked_mul(dim_a) != Some(amplitudes.dim()) {
            return Err(shape_err(
                "PureCompositeState",
                format!("{} amplitudes", dim_s.saturating_mul(dim_a)),
                format!("{}", amplitudes.dim()),
            ));
        }
        let n = amplitudes.norm();
        if (n - 1.0).abs() > NumericPolicy::DEFAULT.normalization_tol {
            return Err(Error::Contract(format!("composite state must have unit norm, got {n}")));
        }
        Ok(Self { amplitudes, dim_s, dim_a })
    }

    /// Normalizes before validating.
    pub fn normalized(amplitudes: ComplexVector, dim_s: usize, dim_a: usize) -> Result<Self> {
        Self::new(amplitudes.normalized()?, dim_s, dim_a)
    }

    pub fn product(s: &ComplexVector, a: &ComplexVector) -> Result<Self> {
        Self::normalized(linalg::tensor_vector(s, a), s.dim(), a.dim())
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn to_relational(&self) -> RelationalMatrix {
        RelationalMatrix::from_state(self)
    }

    /// `|Psi><Psi|`.
    pub fn density(&self) -> ComplexMatrix {
        self.amplitudes.projector()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, tensor_product, TracedSide};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn real(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    fn bell() -> RelationalMatrix {
        RelationalMatrix::maximally_entangled(2)
    }

    fn random_r(n: usize, m: usize, rng: &mut ChaCha8Rng) -> RelationalMatrix {
        RelationalMatrix::new(random::gaussian_matrix(n, m, rng)).unwrap()
    }

    #[test]
    fn from_product_basis() {
        let e0 = ComplexVector::basis(2, 0);
        let r = RelationalMatrix::from_product(&e0, &e0).unwrap();
        assert_eq!(r.matrix(), &real(&[&[1.0, 0.0], &[0.0, 0.0]]));
        assert!(r.is_product(1e-10));
    }

    #[test]
    fn from_product_superposition() {
        let c = ComplexVector::from_real(&[S, S]).unwrap();
        let r = RelationalMatrix::from_product(&c, &ComplexVector::basis(2, 0)).unwrap();
        assert!(r.matrix().max_abs_diff(&real(&[&[S, 0.0], &[S, 0.0]])) < 1e-15);
    }

    #[test]
    fn from_product_zero_rejected() {
        let z = ComplexVector::zeros(2);
        assert!(matches!(
            RelationalMatrix::from_product(&z, &ComplexVector::basis(2, 0)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn construction_normalizes_and_keeps_weight() {
        let r = RelationalMatrix::new(real(&[&[2.0, 0.0], &[0.0, 0.0]])).unwrap();
        assert_eq!(r.weight(), 4.0);
        assert_eq!(r.get(0, 0), C64::new(1.0, 0.0));
        assert!(r.unnormalized().max_abs_diff(&real(&[&[2.0, 0.0], &[0.0, 0.0]])) < 1e-15);
    }

    #[test]
    fn wave_function_examples() {
        let e0 = ComplexVector::basis(2, 0);
        let r = RelationalMatrix::from_product(&e0, &e0).unwrap();
        assert!(r.wave_function().unwrap().max_abs_diff(&e0) < 1e-15);
        let r = RelationalMatrix::new(real(&[&[S, 0.0], &[S, 0.0]])).unwrap();
        let phi = r.wave_function().unwrap();
        assert!(phi.max_abs_diff(&ComplexVector::from_real(&[S, S]).unwrap()) < 1e-15);
    }

    #[test]
    fn wave_function_rejects_entangled() {
        assert!(matches!(bell().wave_function(), Err(Error::Precondition(_))));
    }

    #[test]
    fn wave_function_vanishing_row_sum_falls_back() {
        let c = ComplexVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let d = ComplexVector::from_real(&[S, -S]).unwrap();
        let r = RelationalMatrix::from_product(&c, &d).unwrap();
        let phi = r.wave_function().unwrap();
        assert!(phi.max_abs_diff_up_to_phase(&c) < 1e-12);
    }

    #[test]
    fn wave_function_born_consistency_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let c = random::gaussian_vector(3, &mut rng);
            let d = random::gaussian_vector(4, &mut rng);
            let r = RelationalMatrix::from_product(&c, &d).unwrap();
            let phi = r.wave_function().unwrap();
            for i in 0..3 {
                assert!((phi.get(i).norm_sqr() - r.event_probability(i).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn event_probability_examples() {
        let e0 = ComplexVector::basis(2, 0);
        let r = RelationalMatrix::from_product(&e0, &e0).unwrap();
        assert_eq!(r.event_probability(0).unwrap(), 1.0);
        assert!((bell().event_probability(0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(bell().event_probability(2), Err(Error::Contract(_))));
    }

    #[test]
    fn event_probability_matches_reduced_density_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = random_r(4, 3, &mut rng);
        let rho = r.reduced_density();
        let total: f64 = r.event_probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        for i in 0..4 {
            assert!((r.event_probability(i).unwrap() - rho.get(i, i).re).abs() < 1e-12);
        }
    }

    #[test]
    fn apparatus_probability_examples() {
        let e0 = ComplexVector::basis(2, 0);
        let r = RelationalMatrix::from_product(&e0, &e0).unwrap();
        assert_eq!(r.apparatus_probability(1).unwrap(), 0.0);
        assert!((bell().apparatus_probability(0).unwrap() - 0.5).abs() < 1e-15);
        assert!(r.apparatus_probability(2).is_err());
    }

    #[test]
    fn apparatus_probability_matches_projector_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let r = random_r(3, 4, &mut rng);
        let psi = r.to_state_vector();
        let total: f64 = r.apparatus_probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        for j in 0..4 {
            let pj = ComplexVector::basis(4, j).projector();
            let op = tensor_product(&ComplexMatrix::identity(3), &pj).unwrap();
            let expect = psi.amplitudes().dot(&op.apply(psi.amplitudes()).unwrap()).re;
            assert!((r.apparatus_probability(j).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_density_examples() {
        let e0 = ComplexVector::basis(2, 0);
        let d = ComplexVector::from_real(&[0.6, 0.8]).unwrap();
        let r = RelationalMatrix::from_product(&e0, &d).unwrap();
        assert!(r.reduced_density().max_abs_diff(&e0.projector()) < 1e-15);
        assert!(bell().reduced_density().max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn reduced_density_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let r = random_r(3, 2, &mut rng);
        let full = r.to_state_vector().density();
        let pt = partial_trace(&full, 3, 2, TracedSide::A).unwrap();
        assert!(r.reduced_density().max_abs_diff(&pt) < 1e-12);
        let pt_a = partial_trace(&full, 3, 2, TracedSide::S).unwrap();
        assert!(r.apparatus_density().max_abs_diff(&pt_a) < 1e-12);
    }

    #[test]
    fn is_product_examples() {
        assert!(!bell().is_product(1e-10));
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let c = random::gaussian_vector(3, &mut rng);
        let d = random::gaussian_vector(2, &mut rng);
        assert!(RelationalMatrix::from_product(&c, &d).unwrap().is_product(1e-10));
        // single-row and single-column relations are always products
        assert!(random_r(1, 4, &mut rng).is_product(1e-10));
    }

    #[test]
    fn apply_operator_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let r = random_r(2, 3, &mut rng);
        let same = r.apply_operator(&ComplexMatrix::identity(2)).unwrap();
        assert!(same.matrix().max_abs_diff(r.matrix()) < 1e-15);

        let diag = RelationalMatrix::new(real(&[&[0.6, 0.0], &[0.0, 0.8]])).unwrap();
        let x = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let swapped = diag.apply_operator(&x).unwrap();
        assert!(swapped.matrix().max_abs_diff(&real(&[&[0.0, 0.8], &[0.6, 0.0]])) < 1e-15);

        assert!(matches!(r.apply_operator(&ComplexMatrix::identity(3)), Err(Error::Shape { .. })));
    }

    #[test]
    fn apply_operator_transforms_reduced_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..20 {
            let r = random_r(3, 3, &mut rng);
            let m = random::gaussian_matrix(3, 3, &mut rng);
            let out = r.apply_operator(&m).unwrap();
            let lhs = out.unnormalized();
            let lhs = &lhs * &lhs.adjoint();
            let rhs = &(&m * &r.reduced_density()) * &m.adjoint();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12 * rhs.max_abs().max(1.0));
            assert!((out.weight() - rhs.trace().re).abs() < 1e-12 * out.weight().max(1.0));
        }
    }

    #[test]
    fn apply_operator_annihilation_is_error() {
        let e0 = ComplexVector::basis(2, 0);
        let r = RelationalMatrix::from_product(&e0, &e0).unwrap();
        let p1 = ComplexVector::basis(2, 1).projector();
        assert!(r.apply_operator(&p1).is_err());
    }

    #[test]
    fn apply_local_pair_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let r = random_r(2, 3, &mut rng);
        let same = r
            .apply_local_pair(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3))
            .unwrap();
        assert!(same.matrix().max_abs_diff(r.matrix()) < 1e-15);

        let p1 = ComplexVector::basis(3, 1).projector();
        let proj = r.apply_local_pair(&ComplexMatrix::identity(2), &p1).unwrap();
        for i in 0..2 {
            for j in [0, 2] {
                assert_eq!(proj.get(i, j), C64::new(0.0, 0.0));
            }
        }
        assert!((proj.weight() - r.apparatus_probability(1).unwrap()).abs() < 1e-15);
        assert!(r.apply_local_pair(&ComplexMatrix::identity(3), &p1).is_err());
    }

    #[test]
    fn schmidt_examples() {
        let e0 = ComplexVector::basis(2, 0);
        let sf = RelationalMatrix::from_product(&e0, &e0).unwrap().schmidt().unwrap();
        assert!((sf.coefficients[0] - 1.0).abs() < 1e-15 && sf.coefficients[1].abs() < 1e-15);
        let sf = bell().schmidt().unwrap();
        assert!(sf.coefficients.iter().all(|l| (l - S).abs() < 1e-15));
    }

    #[test]
    fn schmidt_reconstructs_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for (n, m) in [(2, 2), (3, 5), (5, 3), (4, 4)] {
            let r = random_r(n, m, &mut rng);
            let sf = r.schmidt().unwrap();
            let norm: f64 = sf.squared().iter().sum();
            assert!((norm - 1.0).abs() < 1e-10);
            assert!(sf.reconstruct().max_abs_diff(r.matrix()) < 1e-11);
            assert!(sf.u_s.is_unitary(1e-12) && sf.v_a.is_unitary(1e-12));
        }
    }

    #[test]
    fn state_vector_examples() {
        let e0 = ComplexVector::basis(2, 0);
        let psi = RelationalMatrix::from_product(&e0, &e0).unwrap().to_state_vector();
        assert!(psi.amplitudes().max_abs_diff(&ComplexVector::basis(4, 0)) < 1e-15);
        let psi = bell().to_state_vector();
        assert!(psi
            .amplitudes()
            .max_abs_diff(&ComplexVector::from_real(&[S, 0.0, 0.0, S]).unwrap())
            < 1e-15);
    }

    #[test]
    fn pure_state_validation() {
        let v = ComplexVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(PureCompositeState::new(v.clone(), 1, 2).is_err());
        assert!(PureCompositeState::normalized(v.clone(), 1, 2).is_ok());
        assert!(PureCompositeState::normalized(v, 2, 2).is_err());
    }

    #[test]
    fn labels_checked() {
        let r = bell();
        assert!(r.clone().with_labels(vec!["up".into()], vec!["a".into(), "b".into()]).is_err());
        let r = r
            .with_labels(vec!["up".into(), "down".into()], vec!["a0".into(), "a1".into()])
            .unwrap();
        let out = r
            .apply_local_pair(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2))
            .unwrap();
        assert_eq!(out.labels().unwrap().system[1], "down");
    }
}
