//! Relational matrix basics: probabilities, reduced density, wave function,
//! Schmidt form and the product test.
//!
//! Run with `cargo run --example relational_basics`.

use relaq::{entanglement_measure, ComplexMatrix, ComplexVector, RelationalMatrix, C64};

fn main() -> relaq::Result<()> {
    // a product state: the system is in (0.6, 0.8), the apparatus in (1, i)/sqrt2
    let c = ComplexVector::from_real(&[0.6, 0.8])?;
    let d = ComplexVector::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)])?.normalized()?;
    let product = RelationalMatrix::from_product(&c, &d)?;

    println!("product R:\n{:?}", product.matrix());
    println!("system probabilities    {:?}", product.event_probabilities());
    println!("apparatus probabilities {:?}", product.apparatus_probabilities());
    println!("is product: {}", product.is_product(1e-10));
    println!("entanglement H(R) = {:.3e}", entanglement_measure(&product));
    println!("wave function (row sums, normalized): {:?}", product.wave_function()?);

    // an entangled state: unequal weights on the diagonal
    let entangled = RelationalMatrix::new(ComplexMatrix::from_real_rows(&[&[0.8, 0.0], &[0.0, 0.6]])?)?;
    let schmidt = entangled.schmidt()?;
    println!("\nentangled R:\n{:?}", entangled.matrix());
    println!("Schmidt weights lambda^2 = {:?}", schmidt.squared());
    println!("is product: {}", entangled.is_product(1e-10));
    println!("entanglement H(R) = {:.6} nats", entanglement_measure(&entangled));
    println!("reduced density rho_S:\n{:?}", entangled.reduced_density());

    // a zero-weight matrix is rejected rather than normalized
    match RelationalMatrix::new(ComplexMatrix::zeros(2, 2)) {
        Ok(_) => println!("unexpectedly accepted the zero matrix"),
        Err(e) => println!("\nzero matrix rejected: {e}"),
    }
    Ok(())
}
