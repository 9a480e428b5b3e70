//! Measurement of a product initial state: the premeasurement unitary is split
//! into measurement operators, Process 2 correlates S with the apparatus and
//! Process 1 keeps one pointer outcome.
//!
//! Run with `cargo run --example product_measurement`.

use relaq::measurement::measure_product;
use relaq::{
    decompose_premeasurement, entropy_trajectory, process2, sample_outcome, ComplexVector, PremeasurementUnitary,
    RelationalMatrix,
};

fn main() -> relaq::Result<()> {
    let psi0 = ComplexVector::from_real(&[0.6, 0.8])?;
    let u = PremeasurementUnitary::ideal(2);
    let r0 = RelationalMatrix::from_product(&psi0, &ComplexVector::basis(2, u.ready_pointer()))?;

    let mset = decompose_premeasurement(&u)?;
    println!("measurement operators (projective: {}):", mset.is_projective(1e-10));
    for (m, op) in mset.ops().iter().enumerate() {
        println!("M_{m} =\n{op:?}");
    }
    println!("completeness defect {:.2e}", mset.completeness_defect());

    let r_prime = process2(&r0, &mset)?;
    println!("after premeasurement R' =\n{:?}", r_prime.matrix());
    println!("pointer probabilities {:?}", r_prime.apparatus_probabilities());

    let m = sample_outcome(&r_prime, 42);
    let record = measure_product(&r0, &mset, m)?;
    println!("\nsampled outcome {m} with probability {:.4}", record.probability);
    println!("post-measurement state {:?}", record.post_state);

    // entanglement rises to the Shannon entropy of the outcomes, then drops back
    let t = entropy_trajectory(&r0, &mset, m)?;
    println!("entropy trajectory (nats): {:.6} -> {:.6} -> {:.6}", t.h0, t.h_mid, t.h_final);
    Ok(())
}
