//! General bipartite maps on relational operators and the open-system picture.
//!
//! A map `Lambda = sum_k alpha_k B_k ⊗ C_k` acts on the relational operator
//! `R^ = sum_ij R_ij |s_i><a_j|` as `R^ -> sum_k alpha_k B_k R^ C_k^T`. Such maps
//! need not preserve the norm, so [`RelationalOperator`] carries the raw
//! matrix without renormalizing it.
//!
//! Tracing out an environment `E` that starts in `rho_E = sum_m mu_m |e~_m><e~_m|`
//! turns a unitary on `S ⊗ E` into the Kraus channel
//! `E_mk = sqrt(mu_m) <e_k|U|e~_m>`.

use crate::error::{shape_err, Error, Result};
use crate::linalg::{
    check_density, eig_hermitian_with, partial_trace, tensor_product, ComplexMatrix, ComplexVector, TracedSide, C64,
    ONE, ZERO,
};
use crate::policy::NumericPolicy;
use crate::relational::{PureCompositeState, RelationalMatrix};
use serde::Serialize;

/// Unnormalized relational operator `R^ = sum_ij R_ij |s_i><a_j|`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationalOperator {
    r: ComplexMatrix,
}

impl RelationalOperator {
    pub fn new(r: ComplexMatrix) -> Self {
        Self { r }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.r
    }

    pub fn n(&self) -> usize {
        self.r.rows()
    }

    pub fn m(&self) -> usize {
        self.r.cols()
    }

    /// `||R^||_F^2`, the probability weight carried by the operator.
    pub fn weight(&self) -> f64 {
        self.r.frobenius_norm().powi(2)
    }

    /// `R^ R^dagger`, not normalized.
    pub fn reduced_density(&self) -> ComplexMatrix {
        &self.r * &self.r.adjoint()
    }

    /// Normalizes into a [`RelationalMatrix`]; a vanishing operator is an impossible outcome.
    pub fn to_relational(&self) -> Result<RelationalMatrix> {
        RelationalMatrix::new(self.r.clone())
    }

    /// `R^ · R^` entries as the composite vector `sum_ij R_ij |s_i>|a_j>`.
    fn as_vector(&self) -> ComplexVector {
        ComplexVector::new(self.r.row_major()).expect("finite")
    }
}

impl From<&RelationalMatrix> for RelationalOperator {
    fn from(r: &RelationalMatrix) -> Self {
        Self::new(r.matrix().clone())
    }
}

/// One term `alpha B ⊗ C` of a general bipartite map.
#[derive(Clone, Debug, PartialEq)]
pub struct MapTerm {
    pub alpha: C64,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
}

/// `Lambda = sum_k alpha_k B_k ⊗ C_k` with `B_k` on `S` and `C_k` on `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralBipartiteMap {
    terms: Vec<MapTerm>,
}

impl GeneralBipartiteMap {
    pub fn new(terms: Vec<MapTerm>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::Contract("a bipartite map needs at least one term".into()));
        };
        let (n, m) = (first.b.rows(), first.c.rows());
        for (k, t) in terms.iter().enumerate() {
            if t.b.shape() != (n, n) || t.c.shape() != (m, m) {
                return Err(shape_err(
                    "GeneralBipartiteMap",
                    format!("B {n}x{n}, C {m}x{m}"),
                    format!("term {k}: B {}x{}, C {}x{}", t.b.rows(), t.b.cols(), t.c.rows(), t.c.cols()),
                ));
            }
        }
        Ok(Self { terms })
    }

    /// Single term `B ⊗ C` with unit coefficient.
    pub fn local(b: ComplexMatrix, c: ComplexMatrix) -> Result<Self> {
        Self::new(vec![MapTerm { alpha: ONE, b, c }])
    }

    pub fn terms(&self) -> &[MapTerm] {
        &self.terms
    }

    pub fn dim_s(&self) -> usize {
        self.terms[0].b.rows()
    }

    pub fn dim_a(&self) -> usize {
        self.terms[0].c.rows()
    }

    /// The full `NM x NM` matrix `sum_k alpha_k B_k ⊗ C_k`.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let d = self.dim_s() * self.dim_a();
        self.terms.iter().try_fold(ComplexMatrix::zeros(d, d), |acc, t| {
            Ok(acc + tensor_product(&t.b, &t.c)?.scale(t.alpha))
        })
    }

    fn check(&self, op: &'static str, r0: &RelationalOperator) -> Result<()> {
        if (r0.n(), r0.m()) != (self.dim_s(), self.dim_a()) {
            return Err(shape_err(
                op,
                format!("{}x{} relational operator", self.dim_s(), self.dim_a()),
                format!("{}x{}", r0.n(), r0.m()),
            ));
        }
        Ok(())
    }
}

/// `R^ = sum_k alpha_k B_k R^_0 C_k^T`.
pub fn apply_general_map(r0: &RelationalOperator, lam: &GeneralBipartiteMap) -> Result<RelationalOperator> {
    lam.check("apply_general_map", r0)?;
    let r = lam.terms.iter().fold(ComplexMatrix::zeros(r0.n(), r0.m()), |acc, t| {
        acc + (&(&t.b * &r0.r) * &t.c.transpose()).scale(t.alpha)
    });
    Ok(RelationalOperator::new(r))
}

/// `rho_S = sum_kl alpha_k alpha_l^* B_k R^_0 (C_l^dagger C_k)^T R^_0^dagger B_l^dagger`, not normalized.
pub fn reduced_after_map(r0: &RelationalOperator, lam: &GeneralBipartiteMap) -> Result<ComplexMatrix> {
    lam.check("reduced_after_map", r0)?;
    let n = r0.n();
    let r0_dag = r0.r.adjoint();
    let mut rho = ComplexMatrix::zeros(n, n);
    for tk in &lam.terms {
        let left = &tk.b * &r0.r;
        for tl in &lam.terms {
            let middle = (&tl.c.adjoint() * &tk.c).transpose();
            let term = &(&(&left * &middle) * &r0_dag) * &tl.b.adjoint();
            rho = rho + term.scale(tk.alpha * tl.alpha.conj());
        }
    }
    Ok(rho)
}

/// `Tr_A(Lambda |Psi_0><Psi_0| Lambda^dagger)` with `|Psi_0>` built from `R^_0`.
pub fn reduced_after_map_partial_trace(r0: &RelationalOperator, lam: &GeneralBipartiteMap) -> Result<ComplexMatrix> {
    lam.check("reduced_after_map_partial_trace", r0)?;
    let psi = lam.to_matrix()?.apply(&r0.as_vector())?;
    partial_trace(&psi.projector(), r0.n(), r0.m(), TracedSide::A)
}

/// Kraus operators with the environment indices `(m, k)` each one came from.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
    provenance: Vec<Option<(usize, usize)>>,
}

/// Verification summary of a channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChannelReport {
    pub trace_preserving: bool,
    pub choi_min_eig: f64,
    pub cptp: bool,
}

impl KrausChannel {
    /// Wraps square operators of equal size. Trace preservation is checked by
    /// [`verify`](Self::verify), not here, so non-physical sets can be inspected.
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let provenance = vec![None; ops.len()];
        Self::build(ops, provenance)
    }

    fn build(ops: Vec<ComplexMatrix>, provenance: Vec<Option<(usize, usize)>>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::Contract("a Kraus channel needs at least one operator".into()));
        };
        let n = first.rows();
        if let Some(bad) = ops.iter().find(|e| e.shape() != (n, n)) {
            return Err(shape_err(
                "KrausChannel",
                format!("{n}x{n} operators"),
                format!("{}x{}", bad.rows(), bad.cols()),
            ));
        }
        Ok(Self { ops, provenance })
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    /// `(m, k)` for operators induced from an environment, `None` otherwise.
    pub fn provenance(&self) -> &[Option<(usize, usize)>] {
        &self.provenance
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    /// `sum_k E_k rho E_k^dagger`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        if rho.shape() != (n, n) {
            return Err(shape_err("KrausChannel::apply", format!("{n}x{n}"), format!("{}x{}", rho.rows(), rho.cols())));
        }
        Ok(self
            .ops
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, e| acc + &(e * rho) * &e.adjoint()))
    }

    /// `max |sum_k E_k^dagger E_k - I|`.
    pub fn trace_defect(&self) -> f64 {
        let n = self.dim();
        let sum = self
            .ops
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, e| acc + e.adjoint() * e);
        sum.max_abs_diff(&ComplexMatrix::identity(n))
    }

    /// `sum_ij |i><j| ⊗ Lambda(|i><j|)`.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut choi = ComplexMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let unit = ComplexVector::basis(n, i).outer(&ComplexVector::basis(n, j));
                let image = self.apply(&unit).expect("shape matches");
                choi = choi + tensor_product(&unit, &image).expect("desk-scale channel");
            }
        }
        choi
    }

    pub fn verify(&self) -> Result<ChannelReport> {
        self.verify_with(&NumericPolicy::DEFAULT)
    }

    pub fn verify_with(&self, policy: &NumericPolicy) -> Result<ChannelReport> {
        let trace_preserving = self.trace_defect() <= policy.completeness_tol;
        let eig = eig_hermitian_with(&self.choi_matrix(), policy)?;
        let choi_min_eig = eig.values.last().copied().unwrap_or(0.0);
        Ok(ChannelReport {
            trace_preserving,
            choi_min_eig,
            cptp: trace_preserving && choi_min_eig >= -policy.choi_tol,
        })
    }
}

/// True iff the channel is trace preserving and its Choi matrix is positive semidefinite.
pub fn is_cptp(ch: &KrausChannel) -> bool {
    ch.verify().map(|r| r.cptp).unwrap_or(false)
}

fn check_unitary(op: &'static str, u: &ComplexMatrix, d: usize, policy: &NumericPolicy) -> Result<()> {
    if u.shape() != (d, d) {
        return Err(shape_err(op, format!("{d}x{d} unitary"), format!("{}x{}", u.rows(), u.cols())));
    }
    let defect = u.unitarity_defect();
    if defect > policy.unitary_tol {
        return Err(Error::Contract(format!("{op}: map is not unitary, defect {defect:e}")));
    }
    Ok(())
}

/// `<e|U|f>` as an operator on `S`, for `U` on `S ⊗ E`: `(.)_ik = sum_lq e_l^* U[(i D + l), (k D + q)] f_q`.
fn environment_element(u: &ComplexMatrix, dim_s: usize, e: &ComplexVector, f: &ComplexVector) -> ComplexMatrix {
    let d = e.dim();
    ComplexMatrix::from_fn(dim_s, dim_s, |i, k| {
        let mut acc = ZERO;
        for l in 0..d {
            let el = e.get(l).conj();
            if el == ZERO {
                continue;
            }
            for q in 0..d {
                acc += el * u.get(i * d + l, k * d + q) * f.get(q);
            }
        }
        acc
    })
}

/// Kraus channel induced by `U` on `S ⊗ E` with the environment in `rho_e`.
pub fn kraus_from_environment(u: &ComplexMatrix, rho_e: &ComplexMatrix) -> Result<KrausChannel> {
    kraus_from_environment_with(u, rho_e, &NumericPolicy::DEFAULT)
}

pub fn kraus_from_environment_with(u: &ComplexMatrix, rho_e: &ComplexMatrix, policy: &NumericPolicy) -> Result<KrausChannel> {
    check_density(rho_e, policy)?;
    let d = rho_e.rows();
    if !u.rows().is_multiple_of(d) || u.rows() == 0 {
        return Err(shape_err(
            "kraus_from_environment",
            format!("a multiple of the environment dimension {d}"),
            format!("{}x{}", u.rows(), u.cols()),
        ));
    }
    let dim_s = u.rows() / d;
    check_unitary("kraus_from_environment", u, dim_s * d, policy)?;
    let eig = eig_hermitian_with(rho_e, policy)?;
    let mut ops = Vec::new();
    let mut provenance = Vec::new();
    for (m, &mu) in eig.values.iter().enumerate() {
        if mu <= policy.eigen_clamp {
            continue;
        }
        let mode = eig.vectors.column(m);
        for k in 0..d {
            let e = environment_element(u, dim_s, &ComplexVector::basis(d, k), &mode).scale(C64::new(mu.sqrt(), 0.0));
            if e.max_abs() > policy.eq_tol {
                ops.push(e);
                provenance.push(Some((m, k)));
            }
        }
    }
    KrausChannel::build(ops, provenance)
}

/// Same as [`kraus_from_environment`] for a pure environment state.
pub fn kraus_from_pure_environment(u: &ComplexMatrix, e0: &ComplexVector) -> Result<KrausChannel> {
    kraus_from_environment(u, &e0.normalized()?.projector())
}

fn check_unit(op: &'static str, v: &ComplexVector, policy: &NumericPolicy) -> Result<()> {
    let dev = (v.norm() - 1.0).abs();
    if dev > policy.normalization_tol {
        return Err(Error::Contract(format!("{op}: vector norm deviates from 1 by {dev:e}")));
    }
    Ok(())
}

/// Selective open-system measurement: `M_m = <phi_m|U|e~_0>`, returning
/// the unnormalized `M_m rho_S M_m^dagger` and `p_m = Tr(M_m rho_S M_m^dagger)`.
pub fn oqs_selective(
    u: &ComplexMatrix,
    rho_s: &ComplexMatrix,
    e0: &ComplexVector,
    phi_m: &ComplexVector,
) -> Result<(ComplexMatrix, f64)> {
    oqs_selective_with(u, rho_s, e0, phi_m, &NumericPolicy::DEFAULT)
}

pub fn oqs_selective_with(
    u: &ComplexMatrix,
    rho_s: &ComplexMatrix,
    e0: &ComplexVector,
    phi_m: &ComplexVector,
    policy: &NumericPolicy,
) -> Result<(ComplexMatrix, f64)> {
    check_density(rho_s, policy)?;
    check_unit("oqs_selective", e0, policy)?;
    check_unit("oqs_selective", phi_m, policy)?;
    if e0.dim() != phi_m.dim() {
        return Err(shape_err("oqs_selective", format!("pointer of length {}", e0.dim()), format!("length {}", phi_m.dim())));
    }
    let dim_s = rho_s.rows();
    check_unitary("oqs_selective", u, dim_s * e0.dim(), policy)?;
    let m_op = environment_element(u, dim_s, phi_m, e0);
    let rho_m = &(&m_op * rho_s) * &m_op.adjoint();
    let p = rho_m.trace().re.clamp(0.0, 1.0);
    Ok((rho_m, p))
}

/// `|psi_m> = <phi_m|U|Psi_0> / sqrt(p_m)` together with `p_m`.
pub fn oqs_entangled(psi0: &PureCompositeState, u: &ComplexMatrix, phi_m: &ComplexVector) -> Result<(ComplexVector, f64)> {
    oqs_entangled_with(psi0, u, phi_m, &NumericPolicy::DEFAULT)
}

pub fn oqs_entangled_with(
    psi0: &PureCompositeState,
    u: &ComplexMatrix,
    phi_m: &ComplexVector,
    policy: &NumericPolicy,
) -> Result<(ComplexVector, f64)> {
    let (dim_s, dim_e) = (psi0.dim_s(), psi0.dim_a());
    check_unitary("oqs_entangled", u, dim_s * dim_e, policy)?;
    check_unit("oqs_entangled", phi_m, policy)?;
    if phi_m.dim() != dim_e {
        return Err(shape_err("oqs_entangled", format!("pointer of length {dim_e}"), format!("length {}", phi_m.dim())));
    }
    let psi1 = u.apply(psi0.amplitudes())?;
    let contracted = ComplexVector::new(
        (0..dim_s)
            .map(|i| (0..dim_e).map(|l| phi_m.get(l).conj() * psi1.get(i * dim_e + l)).sum())
            .collect(),
    )?;
    let p = contracted.norm_sqr();
    if p < policy.min_probability {
        return Err(Error::ImpossibleOutcome {
            outcome: None,
            probability: p,
        });
    }
    Ok((contracted.scale(C64::new(1.0 / p.sqrt(), 0.0)), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::entanglement_measure;
    use crate::measurement::{
        decompose_premeasurement, measure_entangled, process1, PointerBasis, PremeasurementUnitary,
    };
    use crate::random;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_map(n: usize, m: usize, terms: usize, g: &mut ChaCha8Rng) -> GeneralBipartiteMap {
        GeneralBipartiteMap::new(
            (0..terms)
                .map(|_| MapTerm {
                    alpha: C64::new(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0)),
                    b: random::gaussian_matrix(n, n, g),
                    c: random::gaussian_matrix(m, m, g),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_term_leaves_operator_unchanged() {
        let r0 = RelationalOperator::new(random::gaussian_matrix(2, 3, &mut rng(1)));
        let lam = GeneralBipartiteMap::local(ComplexMatrix::identity(2), ComplexMatrix::identity(3)).unwrap();
        assert_eq!(apply_general_map(&r0, &lam).unwrap(), r0);
        let rho = reduced_after_map(&r0, &lam).unwrap();
        assert!(rho.max_abs_diff(&r0.reduced_density()) < 1e-14);
    }

    #[test]
    fn single_term_matches_local_pair() {
        let mut g = rng(2);
        let r = RelationalMatrix::new(random::gaussian_matrix(3, 2, &mut g)).unwrap();
        let (q, o) = (random::unitary(3, &mut g), random::unitary(2, &mut g));
        let lam = GeneralBipartiteMap::local(q.clone(), o.clone()).unwrap();
        let out = apply_general_map(&RelationalOperator::from(&r), &lam).unwrap();
        assert!(out.matrix().max_abs_diff(r.apply_local_pair(&q, &o).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn two_terms_match_index_loops() {
        let mut g = rng(3);
        let r0 = RelationalOperator::new(random::gaussian_matrix(2, 3, &mut g));
        let lam = random_map(2, 3, 2, &mut g);
        let out = apply_general_map(&r0, &lam).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                let mut acc = ZERO;
                for t in lam.terms() {
                    for p in 0..2 {
                        for q in 0..3 {
                            acc += t.alpha * t.b.get(i, p) * r0.matrix().get(p, q) * t.c.get(j, q);
                        }
                    }
                }
                assert!((out.matrix().get(i, j) - acc).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reduced_routes_agree() {
        let mut g = rng(4);
        for _ in 0..30 {
            let (n, m) = (g.random_range(1..=4), g.random_range(1..=4));
            let r0 = RelationalOperator::from(&RelationalMatrix::new(random::gaussian_matrix(n, m, &mut g)).unwrap());
            let lam = random_map(n, m, g.random_range(1..=4), &mut g);
            let a = reduced_after_map(&r0, &lam).unwrap();
            let b = reduced_after_map_partial_trace(&r0, &lam).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-11);
            // the reduced density of the mapped operator is the same matrix
            let c = apply_general_map(&r0, &lam).unwrap().reduced_density();
            assert!(a.max_abs_diff(&c) < 1e-11);
        }
    }

    #[test]
    fn system_only_map() {
        let mut g = rng(5);
        let r0 = RelationalOperator::from(&RelationalMatrix::new(random::gaussian_matrix(3, 2, &mut g)).unwrap());
        let terms: Vec<MapTerm> = (0..3)
            .map(|_| MapTerm {
                alpha: C64::new(g.random_range(-1.0..1.0), 0.3),
                b: random::gaussian_matrix(3, 3, &mut g),
                c: ComplexMatrix::identity(2),
            })
            .collect();
        let lambda_s = terms
            .iter()
            .fold(ComplexMatrix::zeros(3, 3), |acc, t| acc + t.b.scale(t.alpha));
        let lam = GeneralBipartiteMap::new(terms).unwrap();
        let expected = &(&lambda_s * &r0.reduced_density()) * &lambda_s.adjoint();
        assert!(reduced_after_map(&r0, &lam).unwrap().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn local_unitaries_preserve_entanglement() {
        let mut g = rng(6);
        let r = RelationalMatrix::new(random::gaussian_matrix(3, 3, &mut g)).unwrap();
        let lam = GeneralBipartiteMap::local(random::unitary(3, &mut g), random::unitary(3, &mut g)).unwrap();
        let out = apply_general_map(&RelationalOperator::from(&r), &lam).unwrap().to_relational().unwrap();
        assert!((entanglement_measure(&out) - entanglement_measure(&r)).abs() < 1e-10);
    }

    #[test]
    fn projection_map_reproduces_process1() {
        let r = RelationalMatrix::new(random::gaussian_matrix(2, 3, &mut rng(7))).unwrap();
        let lam = GeneralBipartiteMap::local(ComplexMatrix::identity(2), ComplexVector::basis(3, 1).projector()).unwrap();
        let out = apply_general_map(&RelationalOperator::from(&r), &lam).unwrap().to_relational().unwrap();
        let rec = process1(&r, 1).unwrap();
        assert!(out.matrix().max_abs_diff(rec.post_relational.matrix()) < 1e-12);
    }

    #[test]
    fn mismatched_map_rejected() {
        let r0 = RelationalOperator::new(ComplexMatrix::identity(2));
        let lam = GeneralBipartiteMap::local(ComplexMatrix::identity(3), ComplexMatrix::identity(2)).unwrap();
        assert!(matches!(apply_general_map(&r0, &lam), Err(Error::Shape { .. })));
    }

    #[test]
    fn identity_environment_gives_identity_channel() {
        let ch = kraus_from_pure_environment(&ComplexMatrix::identity(4), &ComplexVector::basis(2, 0)).unwrap();
        assert_eq!(ch.ops().len(), 1);
        assert!(ch.ops()[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(is_cptp(&ch));
    }

    #[test]
    fn controlled_flip_environment_gives_projectors() {
        let u = PremeasurementUnitary::ideal(2);
        let ch = kraus_from_pure_environment(u.matrix(), &ComplexVector::basis(2, 0)).unwrap();
        assert_eq!(ch.ops().len(), 2);
        assert!(ch.ops()[0].max_abs_diff(&ComplexVector::basis(2, 0).projector()) < 1e-15);
        assert!(ch.ops()[1].max_abs_diff(&ComplexVector::basis(2, 1).projector()) < 1e-15);
        assert_eq!(ch.provenance()[1], Some((0, 1)));
    }

    #[test]
    fn mixed_environment_channel() {
        let mut g = rng(8);
        let u = random::unitary(6, &mut g);
        let rho_e = ComplexMatrix::diag_real(&[0.7, 0.3]);
        let ch = kraus_from_environment(&u, &rho_e).unwrap();
        assert!(ch.trace_defect() < 1e-10);
        assert!(is_cptp(&ch));
        let rho_s = random::density(3, &mut g);
        let direct = partial_trace(
            &(&(&u * &tensor_product(&rho_s, &rho_e).unwrap()) * &u.adjoint()),
            3,
            2,
            TracedSide::A,
        )
        .unwrap();
        assert!(ch.apply(&rho_s).unwrap().max_abs_diff(&direct) < 1e-11);
    }

    #[test]
    fn cptp_examples() {
        assert!(is_cptp(&KrausChannel::new(vec![ComplexMatrix::identity(2)]).unwrap()));
        let doubled = KrausChannel::new(vec![ComplexMatrix::identity(2).scale(C64::new(2.0, 0.0))]).unwrap();
        let report = doubled.verify().unwrap();
        assert!(!report.trace_preserving && !report.cptp);
        assert!(report.choi_min_eig >= -1e-12);
    }

    #[test]
    fn invalid_environment_inputs() {
        let bad_rho = ComplexMatrix::diag_real(&[0.7, 0.7]);
        assert!(kraus_from_environment(&ComplexMatrix::identity(4), &bad_rho).is_err());
        let not_unitary = ComplexMatrix::identity(4).scale(C64::new(0.5, 0.0));
        assert!(kraus_from_environment(&not_unitary, &ComplexMatrix::diag_real(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn selective_identity() {
        let rho = random::density(2, &mut rng(9));
        let e0 = ComplexVector::basis(2, 0);
        let (rho_m, p) = oqs_selective(&ComplexMatrix::identity(4), &rho, &e0, &e0).unwrap();
        assert!(rho_m.max_abs_diff(&rho) < 1e-15);
        assert!((p - 1.0).abs() < 1e-14);
        let (_, p) = oqs_selective(&ComplexMatrix::identity(4), &rho, &e0, &ComplexVector::basis(2, 1)).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn selective_matches_measurement_module() {
        let mut g = rng(10);
        let u = PremeasurementUnitary::ideal(3);
        let set = decompose_premeasurement(&u).unwrap();
        let psi = random::state(3, &mut g);
        let e0 = ComplexVector::basis(3, 0);
        let mut total = 0.0;
        for m in 0..3 {
            let (_, p) = oqs_selective(u.matrix(), &psi.projector(), &e0, &ComplexVector::basis(3, m)).unwrap();
            assert!((p - set.probability(&psi, m).unwrap()).abs() < 1e-11);
            total += p;
        }
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn selective_probabilities_sum_to_one() {
        let mut g = rng(11);
        let u = random::unitary(6, &mut g);
        let rho = random::density(2, &mut g);
        let e0 = random::state(3, &mut g);
        let basis = random::unitary(3, &mut g);
        let total: f64 = (0..3)
            .map(|m| oqs_selective(&u, &rho, &e0, &basis.column(m)).unwrap().1)
            .sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn entangled_oqs_bell() {
        let psi0 = RelationalMatrix::maximally_entangled(2).to_state_vector();
        let (psi, p) = oqs_entangled(&psi0, &ComplexMatrix::identity(4), &ComplexVector::basis(2, 0)).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(psi.max_abs_diff(&ComplexVector::basis(2, 0)) < 1e-15);
    }

    #[test]
    fn entangled_oqs_matches_measurement_module() {
        let mut g = rng(12);
        for _ in 0..10 {
            let r0 = RelationalMatrix::new(random::gaussian_matrix(2, 3, &mut g)).unwrap();
            let u = random::unitary(6, &mut g);
            let pointers = PointerBasis::from_unitary(&random::unitary(3, &mut g)).unwrap();
            let pu = PremeasurementUnitary::new(u.clone(), 2, 3, 0).unwrap();
            for m in 0..3 {
                let (psi, p) = oqs_entangled(&r0.to_state_vector(), &u, pointers.vector(m)).unwrap();
                let rec = measure_entangled(&r0, &pu, &pointers, m).unwrap();
                assert!((p - rec.probability).abs() < 1e-11);
                assert!(psi.max_abs_diff(&rec.post_state) < 1e-11);
            }
        }
    }

    #[test]
    fn entangled_oqs_product_reduces_to_selective() {
        let mut g = rng(13);
        let psi = random::state(2, &mut g);
        let e0 = ComplexVector::basis(2, 0);
        let u = random::unitary(4, &mut g);
        let phi = ComplexVector::basis(2, 1);
        let state = PureCompositeState::product(&psi, &e0).unwrap();
        let (post, p) = oqs_entangled(&state, &u, &phi).unwrap();
        let (rho_m, p_sel) = oqs_selective(&u, &psi.projector(), &e0, &phi).unwrap();
        assert!((p - p_sel).abs() < 1e-12);
        let normalized = rho_m.scale(C64::new(1.0 / p_sel, 0.0));
        assert!(post.projector().max_abs_diff(&normalized) < 1e-11);
    }
}
