//! JSON carriers for matrices and vectors, and deterministic report output.
//!
//! Matrices use `{"n": rows, "m": cols, "re": [...], "im": [...]}` in row-major
//! order; vectors use `{"re": [...], "im": [...]}`. `im` may be omitted on
//! input for real data. Reports are written compactly with every float printed
//! at 17 significant digits so that output is byte-stable and round-trips.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, C64};
use crate::relational::RelationalMatrix;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub m: usize,
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

fn combine(re: &[f64], im: Option<&Vec<f64>>) -> Result<Vec<C64>> {
    match im {
        Some(im) if im.len() != re.len() => Err(Error::Contract(format!(
            "\"re\" has {} entries but \"im\" has {}",
            re.len(),
            im.len()
        ))),
        Some(im) => Ok(re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect()),
        None => Ok(re.iter().map(|&a| C64::new(a, 0.0)).collect()),
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let entries = combine(&self.re, self.im.as_ref())?;
        ComplexMatrix::from_row_major(self.n, self.m, entries)
    }
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let entries = m.row_major();
        MatrixJson {
            n: m.rows(),
            m: m.cols(),
            re: entries.iter().map(|z| z.re).collect(),
            im: Some(entries.iter().map(|z| z.im).collect()),
        }
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson::from(&m)
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        j.to_matrix()
    }
}

impl TryFrom<MatrixJson> for RelationalMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        RelationalMatrix::new(j.to_matrix()?)
    }
}

impl From<RelationalMatrix> for MatrixJson {
    fn from(r: RelationalMatrix) -> Self {
        MatrixJson::from(r.matrix())
    }
}

impl VectorJson {
    pub fn to_vector(&self) -> Result<ComplexVector> {
        ComplexVector::new(combine(&self.re, self.im.as_ref())?)
    }
}

impl From<&ComplexVector> for VectorJson {
    fn from(v: &ComplexVector) -> Self {
        VectorJson {
            re: v.entries().iter().map(|z| z.re).collect(),
            im: Some(v.entries().iter().map(|z| z.im).collect()),
        }
    }
}

impl From<ComplexVector> for VectorJson {
    fn from(v: ComplexVector) -> Self {
        VectorJson::from(&v)
    }
}

impl TryFrom<VectorJson> for ComplexVector {
    type Error = Error;
    fn try_from(j: VectorJson) -> Result<Self> {
        j.to_vector()
    }
}

/// Compact JSON formatter printing floats as `{:.16e}` (17 significant digits).
#[derive(Clone, Copy, Debug, Default)]
pub struct FixedDigitsFormatter;

impl serde_json::ser::Formatter for FixedDigitsFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        // -0.0 prints as 0 so sign noise cannot perturb golden output
        let v = if value == 0.0 { 0.0 } else { value };
        write!(writer, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` as a single compact JSON line with fixed-digit floats.
pub fn to_report_json<T: Serialize>(value: &T) -> std::result::Result<String, serde_json::Error> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigitsFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Formats a float at 17 significant digits, as in JSON reports.
pub fn format_f64(value: f64) -> String {
    let v = if value == 0.0 { 0.0 } else { value };
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn relational_json_shape() {
        let r = RelationalMatrix::maximally_entangled(2);
        let s = to_report_json(&r).unwrap();
        assert!(s.starts_with(r#"{"n":2,"m":2,"re":[7.0710678118654746e-1,0.0000000000000000e0"#), "{s}");
        let back: RelationalMatrix = serde_json::from_str(&s).unwrap();
        // deserialization renormalizes, which may move the last bit
        assert!(back.matrix().max_abs_diff(r.matrix()) < 1e-15);
    }

    #[test]
    fn deserialization_normalizes() {
        let r: RelationalMatrix = serde_json::from_str(r#"{"n":1,"m":2,"re":[3,4]}"#).unwrap();
        assert!((r.get(0, 0).re - 0.6).abs() < 1e-15);
        assert!((r.weight() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_parts_rejected() {
        let j: MatrixJson = serde_json::from_str(r#"{"n":1,"m":2,"re":[1,0],"im":[0]}"#).unwrap();
        assert!(j.to_matrix().is_err());
        let j: MatrixJson = serde_json::from_str(r#"{"n":2,"m":2,"re":[1,0]}"#).unwrap();
        assert!(j.to_matrix().is_err());
    }

    proptest! {
        #[test]
        fn fixed_digit_floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = format_f64(x);
            let back: f64 = s.parse().unwrap();
            prop_assert_eq!(back, if x == 0.0 { 0.0 } else { x });
            let json = to_report_json(&x).unwrap();
            let parsed: f64 = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(parsed.to_bits(), back.to_bits());
        }
    }
}
