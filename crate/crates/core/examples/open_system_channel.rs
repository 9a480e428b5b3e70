//! Open-system picture: a unitary on system plus environment induces a Kraus
//! channel, which is checked for complete positivity and trace preservation.
//!
//! Run with `cargo run --example open_system_channel`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relaq::quantum_ops::kraus_from_pure_environment;
use relaq::random;
use relaq::{is_cptp, kraus_from_environment, oqs_entangled, ComplexVector, PureCompositeState};

fn main() -> relaq::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = random::unitary(6, &mut rng);

    // a pure environment gives one Kraus operator per environment basis vector
    let e0 = ComplexVector::basis(3, 0);
    let pure = kraus_from_pure_environment(&u, &e0)?;
    println!("pure environment: {} Kraus operators, trace defect {:.2e}", pure.ops().len(), pure.trace_defect());

    // a mixed environment labels each operator by (mixture index, basis index)
    let rho_e = random::density(3, &mut rng);
    let mixed = kraus_from_environment(&u, &rho_e)?;
    let report = mixed.verify()?;
    println!(
        "mixed environment: {} operators, provenance {:?}",
        mixed.ops().len(),
        &mixed.provenance()[..3]
    );
    println!(
        "trace preserving {}, min Choi eigenvalue {:.2e}, CPTP {}",
        report.trace_preserving, report.choi_min_eig, is_cptp(&mixed)
    );

    let rho_s = random::density(2, &mut rng);
    println!("\nchannel output on a random rho_S:\n{:?}", mixed.apply(&rho_s)?);

    // selective readout of the environment on an entangled initial state
    let psi0 = PureCompositeState::new(random::state(6, &mut rng), 2, 3)?;
    for l in 0..3 {
        let (psi, p) = oqs_entangled(&psi0, &u, &ComplexVector::basis(3, l))?;
        println!("environment outcome {l}: p = {p:.6}, system state {psi:?}");
    }
    Ok(())
}
