//! Measurement when S and the apparatus start out entangled, including the
//! Schmidt-basis operator family and the information-gain inequalities.
//!
//! Run with `cargo run --example entangled_measurement`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relaq::measurement::{info_gain_terms, pointer_probabilities};
use relaq::random;
use relaq::{
    check_info_gain, measure_entangled, schmidt_measurement_ops, ComplexMatrix, PointerBasis, PremeasurementUnitary,
    RelationalMatrix,
};

fn main() -> relaq::Result<()> {
    let r0 = RelationalMatrix::new(ComplexMatrix::from_real_rows(&[&[0.8, 0.0], &[0.0, 0.6]])?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let u = PremeasurementUnitary::new(random::unitary(4, &mut rng), 2, 2, 0)?;
    let pointers = PointerBasis::computational(2);

    let probs = pointer_probabilities(&r0, &u, &pointers)?;
    println!("pointer probabilities {probs:?} (sum {:.12})", probs.iter().sum::<f64>());
    for m in 0..pointers.len() {
        let rec = measure_entangled(&r0, &u, &pointers, m)?;
        println!("outcome {m}: p = {:.6}, post state {:?}", rec.probability, rec.post_state);
    }

    let ops = schmidt_measurement_ops(&r0, &u, &pointers)?;
    println!("\nSchmidt coefficients {:?}", ops.lambdas);
    println!("pairwise completeness defect {:.2e}", ops.pairwise_defect());
    println!("outcome probabilities from the operators: {:.6}, {:.6}", ops.probability(0), ops.probability(1));

    let gain = info_gain_terms(&r0, &u, &pointers)?;
    println!(
        "\nsum p' ln p' = {:.6} vs sum lambda^2 ln lambda^2 = {:.6}; strict gain: {}",
        gain.after,
        gain.before,
        check_info_gain(&r0, &u, &pointers)?
    );
    Ok(())
}
