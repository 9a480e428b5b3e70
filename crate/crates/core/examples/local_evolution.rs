//! Local operations on the pair and the time-evolution versus quantum-operation
//! classifier.
//!
//! Run with `cargo run --example local_evolution`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relaq::random;
use relaq::{classify_process, entanglement_measure, tensor_product, ComplexMatrix, RelationalMatrix};

fn main() -> relaq::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let r = RelationalMatrix::new(random::gaussian_matrix(2, 3, &mut rng))?;

    // local unitaries on S and A never change the entanglement
    let q = random::unitary(2, &mut rng);
    let o = random::unitary(3, &mut rng);
    let local = r.apply_local_pair(&q, &o)?;
    let class = classify_process(&r, &local, 1e-8)?;
    println!("H before {:.6}, after local unitaries {:.6}", entanglement_measure(&r), entanglement_measure(&local));
    println!("classified as {:?} (explicitly relative: {})", class.kind, class.is_explicitly_relative());

    // the same evolution computed on the stacked state vector
    let via_vector = tensor_product(&q, &o)?.apply(r.to_state_vector().amplitudes())?;
    let diff = local.to_state_vector().amplitudes().max_abs_diff_up_to_phase(&via_vector);
    println!("matrix route vs (Q ⊗ O)|Psi>: max difference {diff:.2e}");

    // a rank-one projector on S is a quantum operation: it removes entanglement
    let proj = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]])?;
    let projected = r.apply_local_pair(&proj, &ComplexMatrix::identity(3))?;
    let class = classify_process(&r, &projected, 1e-8)?;
    println!(
        "\nprojecting S onto |s_0>: H {:.6} -> {:.6}, classified as {:?}",
        entanglement_measure(&r),
        entanglement_measure(&projected),
        class.kind
    );
    Ok(())
}
