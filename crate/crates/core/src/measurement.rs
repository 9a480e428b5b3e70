//! The two-stage measurement pipeline.
//!
//! A premeasurement unitary `U` on `S ⊗ A` correlates the system with the
//! apparatus pointer (Process 2); reading a pointer outcome then projects the
//! composite state (Process 1). For a product initial state the unitary is
//! captured by the operator set `M_m = <a_m|U|a_0>`; for an entangled initial
//! state the projection is taken directly on `U|Psi_0>` or through Schmidt
//! measurement operators `M_mi`.
//!
//! Composite indices follow the rest of the crate: amplitude `i * M + j`
//! belongs to `|s_i>|a_j>`.

use crate::error::{shape_err, Error, Result};
use crate::info::entanglement_measure;
use crate::linalg::{tensor_product, ComplexMatrix, ComplexVector, C64, ONE, ZERO};
use crate::policy::NumericPolicy;
use crate::relational::{PureCompositeState, RelationalMatrix};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Measurement operators `M_m`, one per pointer outcome, with `sum M_m^dagger M_m = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOperatorSet {
    ops: Vec<ComplexMatrix>,
}

impl MeasurementOperatorSet {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_policy(ops, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(ops: Vec<ComplexMatrix>, policy: &NumericPolicy) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::Contract("measurement operator set is empty".into()));
        };
        let n = first.rows();
        if let Some(bad) = ops.iter().find(|m| m.shape() != (n, n)) {
            return Err(shape_err(
                "MeasurementOperatorSet",
                format!("{n}x{n} operators"),
                format!("{}x{}", bad.rows(), bad.cols()),
            ));
        }
        let set = Self { ops };
        let defect = set.completeness_defect();
        if defect > policy.completeness_tol {
            return Err(Error::Contract(format!(
                "measurement operators are not complete: max |sum M^dagger M - I| = {defect:e}"
            )));
        }
        Ok(set)
    }

    /// Projective set `{|s_m><s_m|}` in the computational basis.
    pub fn computational(n: usize) -> Self {
        let ops = (0..n).map(|m| ComplexVector::basis(n, m).projector()).collect();
        Self { ops }
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn op(&self, m: usize) -> &ComplexMatrix {
        &self.ops[m]
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// System dimension `N`.
    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    /// `max |sum_m M_m^dagger M_m - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.dim();
        let sum = self
            .ops
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, m| acc + m.adjoint() * m);
        sum.max_abs_diff(&ComplexMatrix::identity(n))
    }

    /// True when every operator is a Hermitian idempotent.
    pub fn is_projective(&self, tol: f64) -> bool {
        self.ops
            .iter()
            .all(|m| m.is_hermitian(tol) && (m * m).max_abs_diff(m) <= tol)
    }

    /// `<psi|M_m^dagger M_m|psi>`.
    pub fn probability(&self, psi: &ComplexVector, m: usize) -> Result<f64> {
        self.check_outcome(m)?;
        Ok(self.ops[m].apply(psi)?.norm_sqr())
    }

    fn check_outcome(&self, m: usize) -> Result<()> {
        if m < self.len() {
            Ok(())
        } else {
            Err(Error::Contract(format!("outcome {m} out of range for {} operators", self.len())))
        }
    }
}

/// Global unitary on `S ⊗ A` together with the ready pointer index `a_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PremeasurementUnitary {
    u: ComplexMatrix,
    dim_s: usize,
    dim_a: usize,
    ready_pointer: usize,
}

impl PremeasurementUnitary {
    pub fn new(u: ComplexMatrix, dim_s: usize, dim_a: usize, ready_pointer: usize) -> Result<Self> {
        Self::with_policy(u, dim_s, dim_a, ready_pointer, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(
        u: ComplexMatrix,
        dim_s: usize,
        dim_a: usize,
        ready_pointer: usize,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let d = dim_s * dim_a;
        if dim_s == 0 || dim_a == 0 || u.shape() != (d, d) {
            return Err(shape_err(
                "PremeasurementUnitary",
                format!("{d}x{d} for N={dim_s}, M={dim_a}"),
                format!("{}x{}", u.rows(), u.cols()),
            ));
        }
        if ready_pointer >= dim_a {
            return Err(Error::Contract(format!(
                "ready pointer {ready_pointer} out of range for apparatus dimension {dim_a}"
            )));
        }
        let defect = u.unitarity_defect();
        if defect > policy.unitary_tol {
            return Err(Error::Contract(format!("premeasurement map is not unitary: defect {defect:e}")));
        }
        Ok(Self {
            u,
            dim_s,
            dim_a,
            ready_pointer,
        })
    }

    /// Identity on `S ⊗ A`.
    pub fn identity(dim_s: usize, dim_a: usize) -> Self {
        Self {
            u: ComplexMatrix::identity(dim_s * dim_a),
            dim_s,
            dim_a,
            ready_pointer: 0,
        }
    }

    /// Ideal premeasurement with `N = M`: `|s_i>|a_j> -> |s_i>|a_{(j + i) mod N}>`.
    ///
    /// With the pointer ready in `|a_0>` this copies the system index onto the
    /// pointer, giving the projective set `{|s_m><s_m|}`.
    pub fn ideal(n: usize) -> Self {
        let d = n * n;
        let u = ComplexMatrix::from_fn(d, d, |row, col| {
            let (i, j) = (col / n, col % n);
            if row == i * n + (j + i) % n {
                ONE
            } else {
                ZERO
            }
        });
        Self {
            u,
            dim_s: n,
            dim_a: n,
            ready_pointer: 0,
        }
    }

    /// Ideal premeasurement of the orthonormal system basis given by the columns of `v`:
    /// `(V ⊗ I) U_ideal (V^dagger ⊗ I)`, with operators `M_m = V|s_m><s_m|V^dagger`.
    pub fn ideal_in_basis(v: &ComplexMatrix) -> Result<Self> {
        let n = v.rows();
        if !v.is_square() || !v.is_unitary(NumericPolicy::DEFAULT.unitary_tol) {
            return Err(Error::Contract("ideal_in_basis needs a unitary basis change".into()));
        }
        let rotate = tensor_product(v, &ComplexMatrix::identity(n))?;
        let u = &(&rotate * Self::ideal(n).matrix()) * &rotate.adjoint();
        Self::new(u, n, n, 0)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn ready_pointer(&self) -> usize {
        self.ready_pointer
    }

    /// `U|Psi>` for a composite state of matching dimensions.
    pub fn evolve(&self, psi: &PureCompositeState) -> Result<PureCompositeState> {
        if (psi.dim_s(), psi.dim_a()) != (self.dim_s, self.dim_a) {
            return Err(shape_err(
                "PremeasurementUnitary::evolve",
                format!("N={}, M={}", self.dim_s, self.dim_a),
                format!("N={}, M={}", psi.dim_s(), psi.dim_a()),
            ));
        }
        let out = self.u.apply(psi.amplitudes())?;
        PureCompositeState::normalized(out, self.dim_s, self.dim_a)
    }

    fn check_relational(&self, op: &'static str, r: &RelationalMatrix) -> Result<()> {
        if (r.n(), r.m()) != (self.dim_s, self.dim_a) {
            return Err(shape_err(
                op,
                format!("{}x{} relational matrix", self.dim_s, self.dim_a),
                format!("{}x{}", r.n(), r.m()),
            ));
        }
        Ok(())
    }
}

/// Orthonormal basis of the apparatus space, one vector `|phi_m>` per outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerBasis {
    vectors: Vec<ComplexVector>,
}

impl PointerBasis {
    pub fn new(vectors: Vec<ComplexVector>) -> Result<Self> {
        Self::with_policy(vectors, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(vectors: Vec<ComplexVector>, policy: &NumericPolicy) -> Result<Self> {
        let dim = vectors.first().map(ComplexVector::dim).unwrap_or(0);
        if dim == 0 || vectors.len() != dim || vectors.iter().any(|v| v.dim() != dim) {
            return Err(shape_err(
                "PointerBasis",
                "a complete basis of equal-length vectors",
                format!("{} vectors of lengths {:?}", vectors.len(), vectors.iter().map(|v| v.dim()).collect::<Vec<_>>()),
            ));
        }
        for (a, va) in vectors.iter().enumerate() {
            for (b, vb) in vectors.iter().enumerate() {
                let expected = if a == b { 1.0 } else { 0.0 };
                let dev = (va.dot(vb) - C64::new(expected, 0.0)).norm();
                if dev > policy.normalization_tol {
                    return Err(Error::Contract(format!(
                        "pointer basis is not orthonormal: |<phi_{a}|phi_{b}> - {expected}| = {dev:e}"
                    )));
                }
            }
        }
        Ok(Self { vectors })
    }

    /// `{|a_m>}`.
    pub fn computational(dim: usize) -> Self {
        Self {
            vectors: (0..dim).map(|m| ComplexVector::basis(dim, m)).collect(),
        }
    }

    /// Columns of a unitary as pointer vectors.
    pub fn from_unitary(v: &ComplexMatrix) -> Result<Self> {
        Self::new((0..v.cols()).map(|j| v.column(j)).collect())
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    pub fn vector(&self, m: usize) -> &ComplexVector {
        &self.vectors[m]
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    fn check(&self, op: &'static str, dim_a: usize) -> Result<()> {
        if self.dim() != dim_a {
            return Err(shape_err(op, format!("pointers of length {dim_a}"), format!("length {}", self.dim())));
        }
        Ok(())
    }
}

/// Entanglement entropies before, between and after the two processes, in nats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyTrajectory {
    pub h0: f64,
    pub h_mid: f64,
    pub h_final: f64,
}

/// Result of reading one pointer outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub outcome_m: usize,
    pub probability: f64,
    /// Normalized post-measurement state of the system.
    pub post_state: ComplexVector,
    /// `R''` after projection; always a product.
    pub post_relational: RelationalMatrix,
    /// Present when the pre-measurement relational matrix was available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_trajectory: Option<EntropyTrajectory>,
}

/// `M_m = <a_m|U|a_0>`: `(M_m)_ik = U[(i M + m), (k M + a_0)]`.
pub fn decompose_premeasurement(u: &PremeasurementUnitary) -> Result<MeasurementOperatorSet> {
    decompose_premeasurement_with(u, &NumericPolicy::DEFAULT)
}

pub fn decompose_premeasurement_with(u: &PremeasurementUnitary, policy: &NumericPolicy) -> Result<MeasurementOperatorSet> {
    let (n, m_dim, a0) = (u.dim_s, u.dim_a, u.ready_pointer);
    let ops = (0..m_dim)
        .map(|m| ComplexMatrix::from_fn(n, n, |i, k| u.u.get(i * m_dim + m, k * m_dim + a0)))
        .collect();
    MeasurementOperatorSet::with_policy(ops, policy)
}

/// Process 2 on a product state: `R'_im = (M_m c)_i` with `c` the system wave function.
pub fn process2(r0: &RelationalMatrix, mset: &MeasurementOperatorSet) -> Result<RelationalMatrix> {
    process2_with(r0, mset, &NumericPolicy::DEFAULT)
}

pub fn process2_with(r0: &RelationalMatrix, mset: &MeasurementOperatorSet, policy: &NumericPolicy) -> Result<RelationalMatrix> {
    if mset.dim() != r0.n() {
        return Err(shape_err(
            "process2",
            format!("{0}x{0} operators", r0.n()),
            format!("{0}x{0}", mset.dim()),
        ));
    }
    if !r0.is_product_with(policy.rank_tol, policy)? {
        return Err(Error::Precondition(
            "process2 needs a product initial state; use measure_entangled for entangled ones".into(),
        ));
    }
    let c = r0.wave_function_with(policy)?;
    let columns = mset.ops.iter().map(|m| m.apply(&c)).collect::<Result<Vec<_>>>()?;
    let r = ComplexMatrix::from_fn(r0.n(), mset.len(), |i, m| columns[m].get(i));
    RelationalMatrix::new(r)
}

/// Process 1: keep column `m` of `R'`, i.e. `R'' = R' P_m^T`.
pub fn process1(r_prime: &RelationalMatrix, m: usize) -> Result<MeasurementRecord> {
    process1_with(r_prime, m, &NumericPolicy::DEFAULT)
}

pub fn process1_with(r_prime: &RelationalMatrix, m: usize, policy: &NumericPolicy) -> Result<MeasurementRecord> {
    let probability = r_prime.apparatus_probability(m)?;
    if probability < policy.min_probability {
        return Err(Error::ImpossibleOutcome {
            outcome: Some(m),
            probability,
        });
    }
    let p_m = ComplexVector::basis(r_prime.m(), m).projector();
    let post = r_prime.apply_local_pair_outcome(&ComplexMatrix::identity(r_prime.n()), &p_m, m, policy)?;
    let post_state = r_prime.matrix().column(m).normalized()?;
    Ok(MeasurementRecord {
        outcome_m: m,
        probability,
        post_state,
        post_relational: post,
        entropy_trajectory: None,
    })
}

/// Process 2 followed by Process 1 at outcome `m`, with the entropy trajectory filled in.
pub fn measure_product(r0: &RelationalMatrix, mset: &MeasurementOperatorSet, m: usize) -> Result<MeasurementRecord> {
    measure_product_with(r0, mset, m, &NumericPolicy::DEFAULT)
}

pub fn measure_product_with(
    r0: &RelationalMatrix,
    mset: &MeasurementOperatorSet,
    m: usize,
    policy: &NumericPolicy,
) -> Result<MeasurementRecord> {
    let r_prime = process2_with(r0, mset, policy)?;
    let mut record = process1_with(&r_prime, m, policy)?;
    record.entropy_trajectory = Some(EntropyTrajectory {
        h0: entanglement_measure(r0),
        h_mid: entanglement_measure(&r_prime),
        h_final: entanglement_measure(&record.post_relational),
    });
    Ok(record)
}

/// `(H(R_0), H(R'), H(R''_m))` for a product initial state.
pub fn entropy_trajectory(r0: &RelationalMatrix, mset: &MeasurementOperatorSet, m: usize) -> Result<EntropyTrajectory> {
    Ok(measure_product(r0, mset, m)?
        .entropy_trajectory
        .expect("measure_product fills the trajectory"))
}

/// Projection of `U|Psi_0>` onto a single pointer vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerProjection {
    /// `R'`, the relational matrix of `U|Psi_0>`.
    pub r_prime: RelationalMatrix,
    /// `<phi|U|Psi_0>`, not normalized.
    pub contracted: ComplexVector,
    /// `p' = ||<phi|U|Psi_0>||^2`.
    pub probability: f64,
}

/// `<phi|U|Psi_0>` as a system vector, together with `R'` and `p'`.
pub fn project_pointer(r0: &RelationalMatrix, u: &PremeasurementUnitary, phi: &ComplexVector) -> Result<PointerProjection> {
    u.check_relational("project_pointer", r0)?;
    if phi.dim() != u.dim_a {
        return Err(shape_err("project_pointer", format!("pointer of length {}", u.dim_a), format!("length {}", phi.dim())));
    }
    let r_prime = u.evolve(&r0.to_state_vector())?.to_relational();
    let contracted = r_prime.matrix().apply(&phi.conj())?;
    let probability = contracted.norm_sqr();
    Ok(PointerProjection {
        r_prime,
        contracted,
        probability,
    })
}

/// Measurement of an arbitrary (possibly entangled) initial state with outcome `m`
/// of the pointer basis: `|psi_m> = <phi_m|U|Psi_0> / sqrt(p'_m)`.
pub fn measure_entangled(
    r0: &RelationalMatrix,
    u: &PremeasurementUnitary,
    pointers: &PointerBasis,
    m: usize,
) -> Result<MeasurementRecord> {
    measure_entangled_with(r0, u, pointers, m, &NumericPolicy::DEFAULT)
}

pub fn measure_entangled_with(
    r0: &RelationalMatrix,
    u: &PremeasurementUnitary,
    pointers: &PointerBasis,
    m: usize,
    policy: &NumericPolicy,
) -> Result<MeasurementRecord> {
    pointers.check("measure_entangled", u.dim_a)?;
    if m >= pointers.len() {
        return Err(Error::Contract(format!("outcome {m} out of range for {} pointers", pointers.len())));
    }
    let phi = pointers.vector(m);
    let proj = project_pointer(r0, u, phi)?;
    if proj.probability < policy.min_probability {
        return Err(Error::ImpossibleOutcome {
            outcome: Some(m),
            probability: proj.probability,
        });
    }
    let post_state = proj.contracted.scale(C64::new(1.0 / proj.probability.sqrt(), 0.0));
    let post_relational = RelationalMatrix::from_product(&post_state, phi)?;
    Ok(MeasurementRecord {
        outcome_m: m,
        probability: proj.probability,
        entropy_trajectory: Some(EntropyTrajectory {
            h0: entanglement_measure(r0),
            h_mid: entanglement_measure(&proj.r_prime),
            h_final: entanglement_measure(&post_relational),
        }),
        post_state,
        post_relational,
    })
}

/// `p'_m` for every pointer in the basis.
pub fn pointer_probabilities(r0: &RelationalMatrix, u: &PremeasurementUnitary, pointers: &PointerBasis) -> Result<Vec<f64>> {
    pointers.check("pointer_probabilities", u.dim_a)?;
    let r_prime = u.evolve(&r0.to_state_vector())?.to_relational();
    pointers
        .vectors
        .iter()
        .map(|phi| Ok(r_prime.matrix().apply(&phi.conj())?.norm_sqr()))
        .collect()
}

/// `d_m = sum_j <a_j|phi_m>`, the column-sum form of the post-state factor.
///
/// Diagnostic only: post-states are normalized with `1 / sqrt(p'_m)`.
pub fn pointer_column_sum(phi: &ComplexVector) -> C64 {
    phi.entries().iter().sum()
}

/// Operators `M_mi = lambda_i <phi_m|U (U_S ⊗ V_A)|a~_i>` built from the Schmidt form of `R_0`.
#[derive(Clone, Debug)]
pub struct SchmidtMeasurementOps {
    /// `ops[m][i]`, each `N x N`.
    pub ops: Vec<Vec<ComplexMatrix>>,
    /// Schmidt coefficients `lambda_i`, descending.
    pub lambdas: Vec<f64>,
    /// `U_S`, whose columns are the system Schmidt vectors.
    pub u_s: ComplexMatrix,
}

impl SchmidtMeasurementOps {
    fn n(&self) -> usize {
        self.u_s.rows()
    }

    /// `max_ij |sum_m M_mi^dagger M_mj - delta_ij lambda_i^2 I|`.
    pub fn pairwise_defect(&self) -> f64 {
        let n = self.n();
        let k = self.lambdas.len();
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let sum = self
                    .ops
                    .iter()
                    .fold(ComplexMatrix::zeros(n, n), |acc, row| acc + row[i].adjoint() * &row[j]);
                let target = if i == j { self.lambdas[i].powi(2) } else { 0.0 };
                let expected = ComplexMatrix::identity(n).scale(C64::new(target, 0.0));
                worst = worst.max(sum.max_abs_diff(&expected));
            }
        }
        worst
    }

    /// `max |sum_m sum_ij M_mi^dagger M_mj - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.n();
        let mut sum = ComplexMatrix::zeros(n, n);
        for row in &self.ops {
            let total = row.iter().fold(ComplexMatrix::zeros(n, n), |acc, op| acc + op.clone());
            sum = sum + total.adjoint() * &total;
        }
        sum.max_abs_diff(&ComplexMatrix::identity(n))
    }

    /// `sum_i M_mi |s~_i>` with `|s~_i>` the reference basis vectors.
    fn contracted(&self, m: usize) -> ComplexVector {
        let n = self.n();
        let entries = (0..n)
            .map(|p| (0..self.lambdas.len()).map(|i| self.ops[m][i].get(p, i)).sum())
            .collect();
        ComplexVector::new(entries).expect("finite")
    }

    /// `p'_m = || sum_i M_mi |s~_i> ||^2`.
    pub fn probability(&self, m: usize) -> f64 {
        self.contracted(m).norm_sqr()
    }

    /// `(1 / sqrt(p'_m)) sum_i M_mi |s~_i>`.
    pub fn post_state(&self, m: usize) -> Result<ComplexVector> {
        let v = self.contracted(m);
        let p = v.norm_sqr();
        if p < NumericPolicy::DEFAULT.min_probability {
            return Err(Error::ImpossibleOutcome {
                outcome: Some(m),
                probability: p,
            });
        }
        Ok(v.scale(C64::new(1.0 / p.sqrt(), 0.0)))
    }
}

pub fn schmidt_measurement_ops(
    r0: &RelationalMatrix,
    u: &PremeasurementUnitary,
    pointers: &PointerBasis,
) -> Result<SchmidtMeasurementOps> {
    u.check_relational("schmidt_measurement_ops", r0)?;
    pointers.check("schmidt_measurement_ops", u.dim_a)?;
    let (n, m_dim) = (u.dim_s, u.dim_a);
    let sf = r0.schmidt()?;
    // V_A maps |a_i> to the apparatus Schmidt vector held in row i of v_a.
    let w = u.u.matmul(&tensor_product(&sf.u_s, &sf.v_a.transpose())?)?;
    let ops = pointers
        .vectors
        .iter()
        .map(|phi| {
            sf.coefficients
                .iter()
                .enumerate()
                .map(|(i, &lambda)| {
                    ComplexMatrix::from_fn(n, n, |p, q| {
                        let amp: C64 = (0..m_dim).map(|l| phi.get(l).conj() * w.get(p * m_dim + l, q * m_dim + i)).sum();
                        amp * lambda
                    })
                })
                .collect()
        })
        .collect();
    Ok(SchmidtMeasurementOps {
        ops,
        lambdas: sf.coefficients,
        u_s: sf.u_s,
    })
}

/// Seeded sampler of pointer outcomes with probabilities `sum_i |R'_im|^2`.
#[derive(Clone, Debug)]
pub struct OutcomeSampler {
    rng: ChaCha8Rng,
}

impl OutcomeSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn sample(&mut self, r_prime: &RelationalMatrix) -> usize {
        let weights = r_prime.apparatus_probabilities();
        let dist = WeightedIndex::new(&weights).expect("normalized relational matrix has positive column weights");
        dist.sample(&mut self.rng)
    }
}

/// One outcome drawn from a fresh generator seeded with `seed`.
pub fn sample_outcome(r_prime: &RelationalMatrix, seed: u64) -> usize {
    OutcomeSampler::new(seed).sample(r_prime)
}

/// Both sides of the information-gain inequality `sum_m p'_m ln p'_m < sum_i lambda_i^2 ln lambda_i^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InfoGain {
    pub after: f64,
    pub before: f64,
}

fn x_ln_x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

pub fn info_gain_terms(r0: &RelationalMatrix, u: &PremeasurementUnitary, pointers: &PointerBasis) -> Result<InfoGain> {
    u.check_relational("info_gain_terms", r0)?;
    let after = pointer_probabilities(r0, u, pointers)?.into_iter().map(x_ln_x).sum();
    let before = r0.schmidt()?.squared().into_iter().map(x_ln_x).sum();
    Ok(InfoGain { after, before })
}

/// True when the premeasurement strictly raises the mutual information.
pub fn check_info_gain(r0: &RelationalMatrix, u: &PremeasurementUnitary, pointers: &PointerBasis) -> Result<bool> {
    check_info_gain_with(r0, u, pointers, &NumericPolicy::DEFAULT)
}

pub fn check_info_gain_with(
    r0: &RelationalMatrix,
    u: &PremeasurementUnitary,
    pointers: &PointerBasis,
    policy: &NumericPolicy,
) -> Result<bool> {
    let g = info_gain_terms(r0, u, pointers)?;
    Ok(g.after < g.before - policy.gain_margin)
}

/// True when `p'_m` strictly exceeds the initial `sum_i |R_im|^2`.
pub fn check_prob_gain(r0: &RelationalMatrix, u: &PremeasurementUnitary, pointers: &PointerBasis, m: usize) -> Result<bool> {
    check_prob_gain_with(r0, u, pointers, m, &NumericPolicy::DEFAULT)
}

pub fn check_prob_gain_with(
    r0: &RelationalMatrix,
    u: &PremeasurementUnitary,
    pointers: &PointerBasis,
    m: usize,
    policy: &NumericPolicy,
) -> Result<bool> {
    u.check_relational("check_prob_gain", r0)?;
    let before = r0.apparatus_probability(m)?;
    let after = *pointer_probabilities(r0, u, pointers)?
        .get(m)
        .ok_or_else(|| Error::Contract(format!("outcome {m} out of range for {} pointers", pointers.len())))?;
    Ok(after > before + policy.gain_margin)
}
