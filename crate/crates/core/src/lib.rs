//! `relaq` - relational quantum measurement.
//!
//! The state primitive is the [`RelationalMatrix`] `R`: an `N x M` matrix of
//! complex amplitudes relating the eigenbasis of a system `S` to the eigenbasis
//! of a reference apparatus `A`. On top of it the crate provides
//!
//! * probabilities, reduced densities, wave functions and the product test
//!   ([`relational`]),
//! * von Neumann entropy, mutual information and the time-evolution versus
//!   quantum-operation classifier ([`info`]),
//! * the two-stage measurement pipeline for product and entangled initial
//!   states ([`measurement`]),
//! * general bipartite maps and the open-system Kraus picture ([`quantum_ops`]),
//! * observer-relative EPR bookkeeping with classical synchronization ([`epr`]),
//! * JSON scenario files and the `relaq` command-line front end ([`cli`]).
//!
//! All entropies are in nats.

pub mod cli;
pub mod epr;
pub mod error;
pub mod info;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod policy;
pub mod quantum_ops;
pub mod random;
pub mod relational;

pub use error::{Error, Result};
pub use info::{
    classify_process, entanglement_measure, mutual_information, unmeasured_info, von_neumann_entropy,
    CompositeDensity, EntropyReport, ProcessClassification, ProcessKind,
};
pub use linalg::{
    eig_hermitian, partial_trace, svd, tensor_product, ComplexMatrix, ComplexVector, HermitianEigen, Svd,
    TracedSide, C64,
};
pub use measurement::{
    check_info_gain, check_prob_gain, decompose_premeasurement, entropy_trajectory, measure_entangled,
    process1, process2, sample_outcome, schmidt_measurement_ops, MeasurementOperatorSet, MeasurementRecord,
    PointerBasis, PremeasurementUnitary, SchmidtMeasurementOps,
};
pub use policy::NumericPolicy;
pub use quantum_ops::{
    apply_general_map, is_cptp, kraus_from_environment, oqs_entangled, oqs_selective, reduced_after_map,
    GeneralBipartiteMap, KrausChannel, RelationalOperator,
};
pub use relational::{PureCompositeState, RelationalMatrix, SchmidtForm};
