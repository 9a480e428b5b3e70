//! Two observers sharing EPR pairs: local measurements, observer-relative
//! descriptions, classical synchronization and a sequence experiment.
//!
//! Run with `cargo run --example epr_observers`.

use relaq::epr::{run_sequence_experiment, Axis, AxisSchedule, EprScenario, Party, Subsystem};

fn main() -> relaq::Result<()> {
    let mut scenario = EprScenario::new(2, 2024);

    let rec = scenario.measure(Party::Alice, 0, Axis::Z)?;
    println!("Alice measured pair 0 along Z: {:?}", rec.result);
    println!("Alice's description of Bob's spin:\n{:?}", scenario.describe(Party::Alice, 0, Subsystem::Beta)?);
    println!("Bob's description before syncing:\n{:?}", scenario.describe(Party::Bob, 0, Subsystem::Beta)?);

    scenario.sync(Party::Alice, Party::Bob)?;
    println!("Bob's description after syncing:\n{:?}", scenario.describe(Party::Bob, 0, Subsystem::Beta)?);

    let bob = scenario.measure(Party::Bob, 0, Axis::Z)?;
    println!("Bob then measures along Z: {:?} (matches Alice: {})", bob.result, bob.result == rec.result);

    for (name, schedule) in [
        ("all Z", AxisSchedule::AllZ),
        ("shared random axes", AxisSchedule::RandomShared),
        (
            "Alice Z, Bob X",
            AxisSchedule::Mismatched {
                alice: Axis::Z,
                bob: Axis::X,
            },
        ),
    ] {
        let report = run_sequence_experiment(1000, &schedule, 7)?;
        println!(
            "\n{name}: match fraction {:.3}, Alice up-fraction {:.3}, Bob up-fraction {:.3}",
            report.match_fraction, report.alice_plus_fraction, report.bob_plus_fraction
        );
    }
    Ok(())
}
