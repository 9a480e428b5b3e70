//! Centralized numeric tolerances.
//!
//! Every comparison that needs a floating-point cutoff reads it from a
//! [`NumericPolicy`]. The defaults are used by the plain entry points; the
//! `*_with` variants and the CLI accept an explicit policy, which the CLI
//! loads from the file named by `RELAQ_NUMERIC_POLICY` when set.

use serde::{Deserialize, Serialize};
use std::path::Path;

/// Environment variable naming a JSON file that overrides default tolerances.
pub const POLICY_ENV: &str = "RELAQ_NUMERIC_POLICY";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericPolicy {
    /// Singular values below `rank_tol * sigma_max` count as zero.
    pub rank_tol: f64,
    /// Generic entrywise equality.
    pub eq_tol: f64,
    /// Max-entry deviation `|h - h^dagger|` accepted as Hermitian.
    pub hermitian_tol: f64,
    /// Max-entry deviation `|U^dagger U - I|` accepted as unitary.
    pub unitary_tol: f64,
    /// Deviation of a norm or trace from one.
    pub normalization_tol: f64,
    /// Max-entry deviation of `sum M^dagger M` from the identity.
    pub completeness_tol: f64,
    /// Most negative eigenvalue accepted for a density matrix.
    pub psd_tol: f64,
    /// Most negative Choi eigenvalue accepted for complete positivity.
    pub choi_tol: f64,
    /// Eigenvalues below this are treated as zero inside `x ln x`.
    pub eigen_clamp: f64,
    /// Entropy change (nats) below which a process counts as time evolution.
    pub classify_tol: f64,
    /// Outcome probabilities below this are impossible outcomes.
    pub min_probability: f64,
    /// Margin applied to the strict inequalities of the gain checkers.
    pub gain_margin: f64,
    /// Largest matrix (in entries) any operation may produce.
    pub max_entries: usize,
    /// Iteration cap handed to the iterative decompositions.
    pub max_iterations: usize,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        rank_tol: 1e-10,
        eq_tol: 1e-12,
        hermitian_tol: 1e-10,
        unitary_tol: 1e-10,
        normalization_tol: 1e-10,
        completeness_tol: 1e-10,
        psd_tol: 1e-10,
        choi_tol: 1e-9,
        eigen_clamp: 1e-12,
        classify_tol: 1e-8,
        min_probability: 1e-14,
        gain_margin: 1e-10,
        max_entries: 1 << 20,
        max_iterations: 10_000,
    };

    /// Reads overrides from a JSON file; missing fields keep their defaults.
    pub fn from_file(path: impl AsRef<Path>) -> std::result::Result<Self, String> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read numeric policy {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("invalid numeric policy {}: {e}", path.display()))
    }

    /// Default policy, overridden by `RELAQ_NUMERIC_POLICY` when that variable is set.
    pub fn from_env() -> std::result::Result<Self, String> {
        match std::env::var_os(POLICY_ENV) {
            Some(path) if !path.is_empty() => Self::from_file(path),
            _ => Ok(Self::DEFAULT),
        }
    }
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override_keeps_defaults() {
        let p: NumericPolicy = serde_json::from_str(r#"{"rank_tol": 1e-6}"#).unwrap();
        assert_eq!(p.rank_tol, 1e-6);
        assert_eq!(p.eq_tol, NumericPolicy::DEFAULT.eq_tol);
        assert_eq!(p.max_entries, 1 << 20);
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(serde_json::from_str::<NumericPolicy>(r#"{"rank_tolerance": 1e-6}"#).is_err());
    }
}
