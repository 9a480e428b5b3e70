//! Entropies and information measures, in nats.

use crate::error::{shape_err, Error, Result};
use crate::linalg::{self, check_density, partial_trace, ComplexMatrix, TracedSide};
use crate::policy::NumericPolicy;
use crate::relational::{PureCompositeState, RelationalMatrix};
use serde::{Deserialize, Serialize};

/// Density matrix of `S ⊗ A`, composite index `i * dim_a + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeDensity {
    rho: ComplexMatrix,
    dim_s: usize,
    dim_a: usize,
}

impl CompositeDensity {
    pub fn new(rho: ComplexMatrix, dim_s: usize, dim_a: usize) -> Result<Self> {
        Self::with_policy(rho, dim_s, dim_a, &NumericPolicy::DEFAULT)
    }

    /// Validates shape, Hermiticity, unit trace and positivity against `policy`.
    pub fn with_policy(rho: ComplexMatrix, dim_s: usize, dim_a: usize, policy: &NumericPolicy) -> Result<Self> {
        let d = dim_s.checked_mul(dim_a).unwrap_or(0);
        if d == 0 || rho.shape() != (d, d) {
            return Err(shape_err(
                "CompositeDensity",
                format!("{d}x{d} for dims {dim_s}x{dim_a}"),
                format!("{}x{}", rho.rows(), rho.cols()),
            ));
        }
        check_density(&rho, policy)?;
        Ok(Self { rho, dim_s, dim_a })
    }

    pub fn from_pure(psi: &PureCompositeState) -> Self {
        Self {
            rho: psi.density(),
            dim_s: psi.dim_s(),
            dim_a: psi.dim_a(),
        }
    }

    pub fn from_relational(r: &RelationalMatrix) -> Self {
        Self::from_pure(&r.to_state_vector())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn reduced_s(&self) -> ComplexMatrix {
        partial_trace(&self.rho, self.dim_s, self.dim_a, TracedSide::A).expect("shape validated")
    }

    pub fn reduced_a(&self) -> ComplexMatrix {
        partial_trace(&self.rho, self.dim_s, self.dim_a, TracedSide::S).expect("shape validated")
    }

    /// `Tr(rho^2)`; 1 for pure states.
    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }
}

/// `-sum p ln p` with entries below `clamp` dropped.
pub fn shannon_entropy(probabilities: &[f64], clamp: f64) -> f64 {
    let h: f64 = probabilities
        .iter()
        .filter(|&&p| p > clamp)
        .map(|&p| -p * p.ln())
        .sum();
    h.max(0.0)
}

fn spectrum_entropy(rho: &ComplexMatrix, policy: &NumericPolicy) -> Result<f64> {
    let eig = linalg::eig_hermitian_with(rho, policy)?;
    Ok(shannon_entropy(&eig.values, policy.eigen_clamp))
}

/// `H(rho) = -sum lambda ln lambda` over the spectrum of a density matrix.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    von_neumann_entropy_with(rho, &NumericPolicy::DEFAULT)
}

pub fn von_neumann_entropy_with(rho: &ComplexMatrix, policy: &NumericPolicy) -> Result<f64> {
    check_density(rho, policy)?;
    spectrum_entropy(rho, policy)
}

/// `H(R R^dagger)`, evaluated from the Schmidt coefficients as `-sum lambda^2 ln lambda^2`.
pub fn entanglement_measure(r: &RelationalMatrix) -> f64 {
    let sf = r.schmidt().expect("svd of a desk-scale matrix converges");
    shannon_entropy(&sf.squared(), NumericPolicy::DEFAULT.eigen_clamp)
}

/// `I(S, A) = H(rho_S) + H(rho_A) - H(rho_SA)`.
pub fn mutual_information(rho_sa: &CompositeDensity) -> f64 {
    mutual_information_parts(rho_sa).3
}

/// `(H(rho_S), H(rho_A), H(rho_SA), I)`.
fn mutual_information_parts(rho_sa: &CompositeDensity) -> (f64, f64, f64, f64) {
    let p = NumericPolicy::DEFAULT;
    let h_s = spectrum_entropy(&rho_sa.reduced_s(), &p).expect("validated density");
    let h_a = spectrum_entropy(&rho_sa.reduced_a(), &p).expect("validated density");
    let h_sa = spectrum_entropy(&rho_sa.rho, &p).expect("validated density");
    (h_s, h_a, h_sa, h_s + h_a - h_sa)
}

/// `I_u = 2 ln N - I(S, A)` for the pure composite described by `r`, with
/// `N = min(dim S, dim A)` (the largest possible Schmidt rank).
pub fn unmeasured_info(r: &RelationalMatrix) -> f64 {
    let n = r.n().min(r.m()) as f64;
    (2.0 * n.ln() - 2.0 * entanglement_measure(r)).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    /// Entanglement entropy unchanged; describable without naming the observer.
    TimeEvolution,
    /// Entanglement entropy changed; the description is relative to an observer.
    QuantumOperation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessClassification {
    pub kind: ProcessKind,
    /// `H(after) - H(before)` in nats.
    pub delta_entropy: f64,
}

impl ProcessClassification {
    /// A process that changes the system's entropy must name its reference observer.
    pub fn is_explicitly_relative(&self) -> bool {
        self.kind == ProcessKind::QuantumOperation
    }
}

/// Classifies `before -> after` by the change of entanglement entropy.
pub fn classify_process(before: &RelationalMatrix, after: &RelationalMatrix, tol: f64) -> Result<ProcessClassification> {
    if before.n() != after.n() {
        return Err(shape_err(
            "classify_process",
            format!("system dimension {}", before.n()),
            format!("{}", after.n()),
        ));
    }
    if !(tol >= 0.0) {
        return Err(Error::Contract("classification tolerance must be nonnegative".into()));
    }
    let delta = entanglement_measure(after) - entanglement_measure(before);
    let kind = if delta.abs() < tol {
        ProcessKind::TimeEvolution
    } else {
        ProcessKind::QuantumOperation
    };
    Ok(ProcessClassification {
        kind,
        delta_entropy: delta,
    })
}

/// Entropy summary of a bipartite state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub h_s: f64,
    pub h_a: f64,
    pub h_sa: f64,
    pub mutual: f64,
    /// Only defined for pure composites.
    pub unmeasured: Option<f64>,
}

impl EntropyReport {
    pub fn from_relational(r: &RelationalMatrix) -> Self {
        let (h_s, h_a, h_sa, mutual) = mutual_information_parts(&CompositeDensity::from_relational(r));
        EntropyReport {
            h_s,
            h_a,
            h_sa,
            mutual,
            unmeasured: Some(unmeasured_info(r)),
        }
    }

    /// For a pure `rho_sa` (purity 1) the unmeasured information is filled in.
    pub fn from_density(rho_sa: &CompositeDensity) -> Self {
        let (h_s, h_a, h_sa, mutual) = mutual_information_parts(rho_sa);
        let unmeasured = if (rho_sa.purity() - 1.0).abs() < 1e-10 {
            let n = rho_sa.dim_s().min(rho_sa.dim_a()) as f64;
            Some((2.0 * n.ln() - mutual).max(0.0))
        } else {
            None
        };
        EntropyReport {
            h_s,
            h_a,
            h_sa,
            mutual,
            unmeasured,
        }
    }

    /// Same report in bits.
    pub fn to_bits(self) -> Self {
        let k = std::f64::consts::LN_2;
        EntropyReport {
            h_s: self.h_s / k,
            h_a: self.h_a / k,
            h_sa: self.h_sa / k,
            mutual: self.mutual / k,
            unmeasured: self.unmeasured.map(|u| u / k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexVector;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::LN_2;

    // -0.9 ln 0.9 - 0.1 ln 0.1, evaluated independently
    const H_09_01: f64 = 0.325_082_973_391_448_2;

    fn bell() -> RelationalMatrix {
        RelationalMatrix::maximally_entangled(2)
    }

    fn schmidt_diag(lambda_sq: &[f64]) -> RelationalMatrix {
        let l: Vec<f64> = lambda_sq.iter().map(|x| x.sqrt()).collect();
        RelationalMatrix::new(ComplexMatrix::diag_real(&l)).unwrap()
    }

    #[test]
    fn constant_oracle() {
        let direct = -0.9f64 * 0.9f64.ln() - 0.1 * 0.1f64.ln();
        assert!((direct - H_09_01).abs() < 1e-16);
    }

    #[test]
    fn entropy_examples() {
        let psi = ComplexVector::from_real(&[0.6, 0.8]).unwrap();
        assert!(von_neumann_entropy(&psi.projector()).unwrap().abs() < 1e-12);
        let mixed = ComplexMatrix::diag_real(&[0.5, 0.5]);
        assert!((von_neumann_entropy(&mixed).unwrap() - LN_2).abs() < 1e-15);
        let h = von_neumann_entropy(&ComplexMatrix::diag_real(&[0.9, 0.1])).unwrap();
        assert!((h - H_09_01).abs() < 1e-14);
    }

    #[test]
    fn entropy_rejects_invalid_density() {
        assert!(von_neumann_entropy(&ComplexMatrix::diag_real(&[0.9, 0.2])).is_err());
        assert!(von_neumann_entropy(&ComplexMatrix::diag_real(&[1.2, -0.2])).is_err());
    }

    #[test]
    fn entropy_bounds_and_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for n in 2..6 {
            let rho = random::density(n, &mut rng);
            let h = von_neumann_entropy(&rho).unwrap();
            assert!(h >= 0.0 && h <= (n as f64).ln() + 1e-9);
            let u = random::unitary(n, &mut rng);
            let rotated = &(&u * &rho) * &u.adjoint();
            assert!((von_neumann_entropy(&rotated).unwrap() - h).abs() < 1e-10);
        }
    }

    #[test]
    fn entanglement_examples() {
        let c = ComplexVector::from_real(&[0.6, 0.8]).unwrap();
        let r = RelationalMatrix::from_product(&c, &c).unwrap();
        assert!(entanglement_measure(&r) < 1e-12);
        assert!((entanglement_measure(&bell()) - LN_2).abs() < 1e-14);
    }

    #[test]
    fn entanglement_matches_reduced_density_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (n, m) in [(2, 2), (3, 4), (4, 2), (5, 5)] {
            let r = RelationalMatrix::new(random::gaussian_matrix(n, m, &mut rng)).unwrap();
            let e = entanglement_measure(&r);
            let oracle = von_neumann_entropy(&r.reduced_density()).unwrap();
            assert!((e - oracle).abs() < 1e-11);
            assert!(e <= (n.min(m) as f64).ln() + 1e-9);
        }
    }

    #[test]
    fn mutual_information_appendix_cases() {
        let lsq = [0.5, 0.5];
        let pure = CompositeDensity::from_relational(&schmidt_diag(&lsq));
        let mixture = CompositeDensity::new(ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]), 2, 2).unwrap();
        let i_pure = mutual_information(&pure);
        let i_mix = mutual_information(&mixture);
        assert!((i_pure - 2.0 * LN_2).abs() < 1e-10);
        assert!((i_mix - LN_2).abs() < 1e-10);
        assert!((i_pure / i_mix - 2.0).abs() < 1e-9);
    }

    #[test]
    fn mutual_information_general_pure_is_twice_entanglement() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..10 {
            let r = RelationalMatrix::new(random::gaussian_matrix(3, 3, &mut rng)).unwrap();
            let rho = CompositeDensity::from_relational(&r);
            let i = mutual_information(&rho);
            assert!((i - 2.0 * entanglement_measure(&r)).abs() < 1e-10);
            let h_s = von_neumann_entropy(&rho.reduced_s()).unwrap();
            let h_a = von_neumann_entropy(&rho.reduced_a()).unwrap();
            assert!((h_s - h_a).abs() < 1e-10);
        }
    }

    #[test]
    fn mutual_information_of_product_mixture_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rs = random::density(2, &mut rng);
        let ra = random::density(3, &mut rng);
        let rho = CompositeDensity::new(crate::linalg::tensor_product(&rs, &ra).unwrap(), 2, 3).unwrap();
        assert!(mutual_information(&rho).abs() < 1e-10);
    }

    #[test]
    fn unmeasured_info_examples() {
        assert!(unmeasured_info(&bell()).abs() < 1e-14);
        let e0 = ComplexVector::basis(2, 0);
        let prod = RelationalMatrix::from_product(&e0, &e0).unwrap();
        assert!((unmeasured_info(&prod) - 2.0 * LN_2).abs() < 1e-14);
        let partial = schmidt_diag(&[0.9, 0.1]);
        assert!((unmeasured_info(&partial) - (2.0 * LN_2 - 2.0 * H_09_01)).abs() < 1e-12);
        assert!((unmeasured_info(&partial) - 0.736_128_414_336_994_2).abs() < 1e-12);
    }

    #[test]
    fn unmeasured_uses_smaller_dimension() {
        // 2x3 maximally entangled within its rank: I_max = 2 ln 2
        let r = RelationalMatrix::new(ComplexMatrix::rect_diag(2, 3, &[1.0, 1.0])).unwrap();
        assert!(unmeasured_info(&r).abs() < 1e-14);
    }

    #[test]
    fn classify_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let r = RelationalMatrix::new(random::gaussian_matrix(3, 2, &mut rng)).unwrap();
        let q = random::unitary(3, &mut rng);
        let o = random::unitary(2, &mut rng);
        let evolved = r.apply_local_pair(&q, &o).unwrap();
        let c = classify_process(&r, &evolved, 1e-8).unwrap();
        assert_eq!(c.kind, ProcessKind::TimeEvolution);
        assert!(!c.is_explicitly_relative());

        let same = classify_process(&r, &r, 1e-8).unwrap();
        assert_eq!(same.delta_entropy, 0.0);
        assert_eq!(same.kind, ProcessKind::TimeEvolution);

        let c = classify_process(&bell(), &RelationalMatrix::from_product(&ComplexVector::basis(2, 0), &ComplexVector::basis(2, 0)).unwrap(), 1e-8).unwrap();
        assert_eq!(c.kind, ProcessKind::QuantumOperation);
        assert!((c.delta_entropy + LN_2).abs() < 1e-14);

        let other = RelationalMatrix::new(random::gaussian_matrix(2, 2, &mut rng)).unwrap();
        assert!(classify_process(&r, &other, 1e-8).is_err());
    }

    #[test]
    fn report_in_bits() {
        let rep = EntropyReport::from_relational(&bell()).to_bits();
        assert!((rep.h_s - 1.0).abs() < 1e-14);
        assert!((rep.mutual - 2.0).abs() < 1e-14);
        assert!(rep.unmeasured.unwrap().abs() < 1e-14);
        let mixed = CompositeDensity::new(ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]), 2, 2).unwrap();
        assert_eq!(EntropyReport::from_density(&mixed).unmeasured, None);
    }
}
