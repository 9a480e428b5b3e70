//! Mutual information of a Bell pair against the matching classical mixture,
//! and the entropy report used by the CLI.
//!
//! Run with `cargo run --example mutual_information`.

use relaq::{mutual_information, ComplexMatrix, CompositeDensity, EntropyReport, RelationalMatrix};

fn main() -> relaq::Result<()> {
    let bell = RelationalMatrix::maximally_entangled(2);
    let pure = CompositeDensity::from_relational(&bell);
    let mixture = CompositeDensity::new(ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]), 2, 2)?;

    let i_pure = mutual_information(&pure);
    let i_mixed = mutual_information(&mixture);
    println!("Bell pair:           I = {i_pure:.12} nats (2 ln 2 = {:.12})", 2.0 * std::f64::consts::LN_2);
    println!("classical mixture:   I = {i_mixed:.12} nats");
    println!("ratio {:.12}", i_pure / i_mixed);

    // unequal Schmidt weights keep the factor of two
    let r = RelationalMatrix::new(ComplexMatrix::from_real_rows(&[&[0.9, 0.0], &[0.0, 0.3]])?)?;
    let report = EntropyReport::from_relational(&r);
    println!("\nentropy report (nats): {report:?}");
    println!("entropy report (bits): {:?}", report.to_bits());
    Ok(())
}
