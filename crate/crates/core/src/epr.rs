//! Observer-relative bookkeeping for Bohm's EPR setup.
//!
//! Two spin-half particles `alpha` (held by Alice) and `beta` (held by Bob)
//! start in a Bell state. Each observer keeps its own description of every
//! pair, conditioned only on the outcome records in its ledger. Measuring
//! updates the measuring observer alone; the other observer learns the result
//! only through [`Observer::synchronize_from`], which merges ledgers.
//!
//! Outcomes are drawn from a per-pair physical state that no observer can read.
//! The first measurement on a pair consumes randomness from the scenario's
//! seeded stream; a later same-axis measurement by the other party is then
//! fixed by conditioning, with no message exchanged.
//!
//! Composite amplitudes are ordered `alpha ⊗ beta`, index `2 a + b`, with
//! `|u> = (1, 0)`, `|d> = (0, 1)`, `|l> = (|u> + |d>)/sqrt2` and `|r> = (|u> - |d>)/sqrt2`.

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, tensor_product, ComplexMatrix, ComplexVector, TracedSide, C64};
use crate::relational::PureCompositeState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

/// Outcomes with probability at least `1 - CERTAINTY_SLACK` are taken as certain
/// and consume no randomness.
const CERTAINTY_SLACK: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    fn index(self) -> usize {
        match self {
            Party::Alice => 0,
            Party::Bob => 1,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Z,
    X,
}

impl Axis {
    /// The two eigenvectors, `+1` eigenvalue first.
    pub fn basis(self) -> [ComplexVector; 2] {
        let h = FRAC_1_SQRT_2;
        match self {
            Axis::Z => [ComplexVector::basis(2, 0), ComplexVector::basis(2, 1)],
            Axis::X => [
                ComplexVector::from_real(&[h, h]).expect("finite"),
                ComplexVector::from_real(&[h, -h]).expect("finite"),
            ],
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Z => "Z",
            Axis::X => "X",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinResult {
    Up,
    Down,
    Left,
    Right,
}

impl SpinResult {
    pub fn new(axis: Axis, index: usize) -> Self {
        match (axis, index) {
            (Axis::Z, 0) => SpinResult::Up,
            (Axis::Z, _) => SpinResult::Down,
            (Axis::X, 0) => SpinResult::Left,
            (Axis::X, _) => SpinResult::Right,
        }
    }

    pub fn axis(self) -> Axis {
        match self {
            SpinResult::Up | SpinResult::Down => Axis::Z,
            SpinResult::Left | SpinResult::Right => Axis::X,
        }
    }

    /// 0 for the `+1` eigenvector (up, left), 1 otherwise.
    pub fn index(self) -> usize {
        match self {
            SpinResult::Up | SpinResult::Left => 0,
            SpinResult::Down | SpinResult::Right => 1,
        }
    }

    pub fn vector(self) -> ComplexVector {
        let [a, b] = self.axis().basis();
        if self.index() == 0 {
            a
        } else {
            b
        }
    }
}

impl fmt::Display for SpinResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinResult::Up => "up",
            SpinResult::Down => "down",
            SpinResult::Left => "left",
            SpinResult::Right => "right",
        })
    }
}

/// A party's outcome on one pair, stamped with the scenario's logical clock.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub pair_index: usize,
    pub party: Party,
    pub axis: Axis,
    pub result: SpinResult,
    pub logical_time: u64,
}

impl OutcomeRecord {
    pub fn new(pair_index: usize, party: Party, result: SpinResult, logical_time: u64) -> Self {
        Self {
            pair_index,
            party,
            axis: result.axis(),
            result,
            logical_time,
        }
    }

    fn check(&self) -> Result<()> {
        if self.result.axis() != self.axis {
            return Err(Error::Scenario(format!(
                "record for pair {} has result {} on axis {}",
                self.pair_index, self.result, self.axis
            )));
        }
        Ok(())
    }
}

/// Sign of the Bell state `(|uu> ± |dd>)/sqrt2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellSign {
    /// `(|uu> + |dd>)/sqrt2 = (|ll> + |rr>)/sqrt2`: same-axis outcomes agree in both bases.
    Plus,
    /// `(|uu> - |dd>)/sqrt2 = (|lr> + |rl>)/sqrt2`: agrees along Z, anticorrelated along X.
    Minus,
}

/// Projector onto `result` for the given party's particle.
fn local_projector(party: Party, result: SpinResult) -> ComplexMatrix {
    let p = result.vector().projector();
    let id = ComplexMatrix::identity(2);
    let (a, b) = match party {
        Party::Alice => (&p, &id),
        Party::Bob => (&id, &p),
    };
    tensor_product(a, b).expect("4x4")
}

/// `(probability, conditioned state)` after projecting `state` onto `result`.
fn condition(state: &PureCompositeState, party: Party, result: SpinResult) -> (f64, Option<PureCompositeState>) {
    let projected = local_projector(party, result)
        .apply(state.amplitudes())
        .expect("4-dim state");
    let p = projected.norm_sqr();
    let post = PureCompositeState::normalized(projected, 2, 2).ok();
    (p, post)
}

/// One pair as it physically is; its state is not visible to observers.
#[derive(Clone, Debug, PartialEq)]
pub struct EprPair {
    state: PureCompositeState,
    initial: PureCompositeState,
    measured: [Option<SpinResult>; 2],
}

impl EprPair {
    pub fn new(sign: BellSign) -> Self {
        let s = match sign {
            BellSign::Plus => 1.0,
            BellSign::Minus => -1.0,
        };
        let amps = ComplexVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, s * FRAC_1_SQRT_2]).expect("finite");
        let state = PureCompositeState::new(amps, 2, 2).expect("unit norm");
        Self {
            initial: state.clone(),
            state,
            measured: [None, None],
        }
    }

    /// The state the pair was prepared in.
    pub fn initial_state(&self) -> &PureCompositeState {
        &self.initial
    }

    /// Coefficients of `|aa'>` with `a, a'` running over `axis`'s eigenvectors, `+1` first.
    pub fn expansion(&self, axis: Axis) -> [C64; 4] {
        let [v0, v1] = axis.basis();
        let vs = [&v0, &v1];
        let mut out = [C64::new(0.0, 0.0); 4];
        for (a, va) in vs.iter().enumerate() {
            for (b, vb) in vs.iter().enumerate() {
                let bra = crate::linalg::tensor_vector(va, vb);
                out[2 * a + b] = bra.dot(self.initial.amplitudes());
            }
        }
        out
    }

    /// The result `party` already obtained on this pair, if any.
    pub fn measured(&self, party: Party) -> Option<SpinResult> {
        self.measured[party.index()]
    }

    /// Outcome probabilities for `party` along `axis` in the pair's current state.
    pub fn probabilities(&self, party: Party, axis: Axis) -> [f64; 2] {
        [0, 1].map(|k| condition(&self.state, party, SpinResult::new(axis, k)).0)
    }

    /// Every outcome with its probability and the conditioned state.
    pub fn branches(&self, party: Party, axis: Axis) -> Vec<(SpinResult, f64, PureCompositeState)> {
        (0..2)
            .filter_map(|k| {
                let r = SpinResult::new(axis, k);
                let (p, post) = condition(&self.state, party, r);
                post.map(|s| (r, p, s))
            })
            .collect()
    }

    /// Samples `party`'s outcome along `axis` and projects the physical state.
    pub fn measure<R: Rng + ?Sized>(&mut self, party: Party, axis: Axis, rng: &mut R) -> Result<SpinResult> {
        if let Some(prev) = self.measured(party) {
            return Err(Error::Scenario(format!("{party} already measured this particle (result {prev})")));
        }
        let [p0, _] = self.probabilities(party, axis);
        let index = if p0 >= 1.0 - CERTAINTY_SLACK {
            0
        } else if p0 <= CERTAINTY_SLACK {
            1
        } else if rng.random::<f64>() < p0 {
            0
        } else {
            1
        };
        let result = SpinResult::new(axis, index);
        let (_, post) = condition(&self.state, party, result);
        self.state = post.expect("sampled outcome has positive probability");
        self.measured[party.index()] = Some(result);
        Ok(result)
    }
}

/// The pair every scenario starts from: `(|uu> + |dd>)/sqrt2`.
pub fn make_epr_pair() -> EprPair {
    EprPair::new(BellSign::Plus)
}

/// Measures one particle with a generator seeded from `seed`; the record has pair index 0 and time 0.
pub fn local_measure(pair: &mut EprPair, party: Party, axis: Axis, seed: u64) -> Result<OutcomeRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result = pair.measure(party, axis, &mut rng)?;
    Ok(OutcomeRecord::new(0, party, result, 0))
}

/// Which part of the composite a description is requested for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    Alpha,
    Beta,
    Both,
}

/// A physically local observer with its own ledger and ledger-conditioned descriptions.
#[derive(Clone, Debug, PartialEq)]
pub struct Observer {
    pub id: String,
    pub location: Party,
    initial: Vec<PureCompositeState>,
    descriptions: Vec<PureCompositeState>,
    ledger: Vec<OutcomeRecord>,
}

impl Observer {
    pub fn new(id: impl Into<String>, location: Party, initial: Vec<PureCompositeState>) -> Self {
        Self {
            id: id.into(),
            location,
            descriptions: initial.clone(),
            initial,
            ledger: Vec::new(),
        }
    }

    pub fn ledger(&self) -> &[OutcomeRecord] {
        &self.ledger
    }

    pub fn description(&self, pair: usize) -> &PureCompositeState {
        &self.descriptions[pair]
    }

    pub fn pairs(&self) -> usize {
        self.descriptions.len()
    }

    /// Density of the requested subsystem of `pair` as this observer describes it.
    pub fn describe(&self, pair: usize, subsystem: Subsystem) -> Result<ComplexMatrix> {
        let state = self
            .descriptions
            .get(pair)
            .ok_or_else(|| Error::Scenario(format!("pair {pair} does not exist")))?;
        let rho = state.density();
        match subsystem {
            Subsystem::Both => Ok(rho),
            Subsystem::Alpha => partial_trace(&rho, 2, 2, TracedSide::A),
            Subsystem::Beta => partial_trace(&rho, 2, 2, TracedSide::S),
        }
    }

    /// This observer's predicted outcome probabilities for `party` along `axis` on `pair`.
    pub fn predict(&self, pair: usize, party: Party, axis: Axis) -> [f64; 2] {
        [0, 1].map(|k| condition(&self.descriptions[pair], party, SpinResult::new(axis, k)).0)
    }

    /// Appends a record and conditions the matching description on it.
    pub fn record(&mut self, rec: OutcomeRecord) -> Result<()> {
        rec.check()?;
        if rec.pair_index >= self.pairs() {
            return Err(Error::Scenario(format!("pair {} does not exist", rec.pair_index)));
        }
        if let Some(existing) = self
            .ledger
            .iter()
            .find(|r| r.pair_index == rec.pair_index && r.party == rec.party)
        {
            if *existing == rec {
                return Ok(());
            }
            return Err(Error::Consistency(format!(
                "{} holds {} for {} on pair {}, incoming record says {}",
                self.id, existing.result, rec.party, rec.pair_index, rec.result
            )));
        }
        self.descriptions[rec.pair_index] = Self::conditioned(&self.descriptions[rec.pair_index], &rec)?;
        self.ledger.push(rec);
        self.ledger.sort_by_key(|r| (r.logical_time, r.pair_index, r.party));
        Ok(())
    }

    fn conditioned(state: &PureCompositeState, rec: &OutcomeRecord) -> Result<PureCompositeState> {
        match condition(state, rec.party, rec.result) {
            (_, Some(post)) => Ok(post),
            (p, None) => Err(Error::Consistency(format!(
                "record {} for {} on pair {} has probability {p:e} in the current description",
                rec.result, rec.party, rec.pair_index
            ))),
        }
    }

    /// Merges `from`'s ledger into this one, deduplicating; conflicting records are an error
    /// and leave this observer unchanged.
    pub fn synchronize_from(&mut self, from: &Observer) -> Result<()> {
        let mut next = self.clone();
        let mut incoming = from.ledger.clone();
        incoming.sort_by_key(|r| (r.logical_time, r.pair_index, r.party));
        for rec in incoming {
            next.record(rec)?;
        }
        *self = next;
        Ok(())
    }

    /// Re-derives every description from the initial states and the ledger.
    pub fn rederive(&self) -> Result<Vec<PureCompositeState>> {
        let mut states = self.initial.clone();
        for rec in &self.ledger {
            states[rec.pair_index] = Self::conditioned(&states[rec.pair_index], rec)?;
        }
        Ok(states)
    }

    /// Largest deviation between stored and re-derived descriptions.
    pub fn consistency_defect(&self) -> Result<f64> {
        Ok(self
            .rederive()?
            .iter()
            .zip(&self.descriptions)
            .map(|(a, b)| a.amplitudes().max_abs_diff(b.amplitudes()))
            .fold(0.0, f64::max))
    }
}

/// Returns `to` after merging `from`'s ledger into it.
pub fn synchronize(from: &Observer, to: &Observer) -> Result<Observer> {
    let mut out = to.clone();
    out.synchronize_from(from)?;
    Ok(out)
}

/// A deterministic two-observer scenario over `n` pairs.
#[derive(Clone, Debug)]
pub struct EprScenario {
    pairs: Vec<EprPair>,
    observers: [Observer; 2],
    rng: ChaCha8Rng,
    clock: u64,
}

impl EprScenario {
    pub fn new(n: usize, seed: u64) -> Self {
        Self::with_sign(n, seed, BellSign::Plus)
    }

    pub fn with_sign(n: usize, seed: u64, sign: BellSign) -> Self {
        let pairs: Vec<EprPair> = (0..n).map(|_| EprPair::new(sign)).collect();
        let initial: Vec<PureCompositeState> = pairs.iter().map(|p| p.initial.clone()).collect();
        Self {
            observers: [
                Observer::new("alice", Party::Alice, initial.clone()),
                Observer::new("bob", Party::Bob, initial),
            ],
            pairs,
            rng: ChaCha8Rng::seed_from_u64(seed),
            clock: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn observer(&self, party: Party) -> &Observer {
        &self.observers[party.index()]
    }

    /// `party` measures its particle of `pair` along `axis`; only that party's observer learns the result.
    pub fn measure(&mut self, party: Party, pair: usize, axis: Axis) -> Result<OutcomeRecord> {
        let p = self
            .pairs
            .get_mut(pair)
            .ok_or_else(|| Error::Scenario(format!("pair {pair} does not exist")))?;
        let result = p.measure(party, axis, &mut self.rng)?;
        let rec = OutcomeRecord::new(pair, party, result, self.clock);
        self.clock += 1;
        self.observers[party.index()].record(rec)?;
        Ok(rec)
    }

    /// Sends `from`'s ledger to `to`.
    pub fn sync(&mut self, from: Party, to: Party) -> Result<()> {
        if from == to {
            return Ok(());
        }
        let source = self.observers[from.index()].clone();
        self.observers[to.index()].synchronize_from(&source)
    }

    pub fn describe(&self, observer: Party, pair: usize, subsystem: Subsystem) -> Result<ComplexMatrix> {
        self.observer(observer).describe(pair, subsystem)
    }
}

/// The fully conditioned state of every pair, given all outcomes of all parties.
///
/// Only tests may look at this: a physical observer is local and learns remote
/// outcomes through synchronization.
#[cfg(any(test, feature = "test-oracles"))]
pub fn super_observer_oracle(scenario: &EprScenario) -> Vec<PureCompositeState> {
    scenario.pairs.iter().map(|p| p.state.clone()).collect()
}

/// How axes are assigned to the pairs of a sequence experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisSchedule {
    AllZ,
    AllX,
    /// Each pair gets Z or X with equal probability, shared by both parties.
    RandomShared,
    /// One shared axis per pair; shorter lists repeat cyclically.
    Explicit(Vec<Axis>),
    /// Diagnostic: Alice and Bob always use different fixed axes.
    Mismatched { alice: Axis, bob: Axis },
}

impl AxisSchedule {
    fn axes<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<(Axis, Axis)> {
        Ok(match self {
            AxisSchedule::AllZ => (Axis::Z, Axis::Z),
            AxisSchedule::AllX => (Axis::X, Axis::X),
            AxisSchedule::RandomShared => {
                let a = if rng.random::<bool>() { Axis::Z } else { Axis::X };
                (a, a)
            }
            AxisSchedule::Explicit(list) if list.is_empty() => {
                return Err(Error::Scenario("explicit axis schedule is empty".into()))
            }
            AxisSchedule::Explicit(list) => (list[k % list.len()], list[k % list.len()]),
            AxisSchedule::Mismatched { alice, bob } => (*alice, *bob),
        })
    }
}

/// One pair of the sequence experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceRow {
    pub pair_index: usize,
    /// Alice's axis; Bob uses the same one unless the schedule is mismatched.
    pub axis: Axis,
    pub alice_result: SpinResult,
    pub bob_result: SpinResult,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceReport {
    pub n: usize,
    pub seed: u64,
    pub schedule: AxisSchedule,
    pub match_fraction: f64,
    /// Fraction of Alice's outcomes that are up or left.
    pub alice_plus_fraction: f64,
    /// Fraction of Bob's outcomes that are up or left.
    pub bob_plus_fraction: f64,
    pub rows: Vec<SequenceRow>,
}

impl SequenceReport {
    /// Rows as CSV with a header line.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Scenario(format!("csv: {e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Scenario(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// `n` pairs measured by Alice and then Bob, without synchronization; matched means
/// both obtained the `+1` eigenvector or both the `-1` one.
pub fn run_sequence_experiment(n: usize, schedule: &AxisSchedule, seed: u64) -> Result<SequenceReport> {
    if n == 0 {
        return Err(Error::Scenario("sequence experiment needs at least one pair".into()));
    }
    let mut scenario = EprScenario::new(n, seed);
    let mut schedule_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e_ed0f_a7e5);
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let (a_axis, b_axis) = schedule.axes(k, &mut schedule_rng)?;
        let a = scenario.measure(Party::Alice, k, a_axis)?;
        let b = scenario.measure(Party::Bob, k, b_axis)?;
        rows.push(SequenceRow {
            pair_index: k,
            axis: a_axis,
            alice_result: a.result,
            bob_result: b.result,
            matched: a.result.index() == b.result.index(),
        });
    }
    let frac = |f: &dyn Fn(&SequenceRow) -> bool| rows.iter().filter(|r| f(r)).count() as f64 / n as f64;
    Ok(SequenceReport {
        n,
        seed,
        schedule: schedule.clone(),
        match_fraction: frac(&|r| r.matched),
        alice_plus_fraction: frac(&|r| r.alice_result.index() == 0),
        bob_plus_fraction: frac(&|r| r.bob_result.index() == 0),
        rows,
    })
}

/// One step of a scenario script.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScriptEvent {
    Measure { party: Party, pair: usize, axis: Axis },
    Sync { from: Party, to: Party },
    Describe { observer: Party, pair: usize, subsystem: Subsystem },
}

/// What a script step produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum ScriptOutput {
    Measure { record: OutcomeRecord },
    Sync { from: Party, to: Party, ledger_len: usize },
    Describe { observer: Party, pair: usize, subsystem: Subsystem, density: ComplexMatrix },
}

/// Runs `events` in order on a fresh scenario of `pairs` pairs.
pub fn run_script(pairs: usize, events: &[ScriptEvent], seed: u64) -> Result<Vec<ScriptOutput>> {
    let mut sc = EprScenario::new(pairs, seed);
    events
        .iter()
        .map(|ev| match *ev {
            ScriptEvent::Measure { party, pair, axis } => Ok(ScriptOutput::Measure {
                record: sc.measure(party, pair, axis)?,
            }),
            ScriptEvent::Sync { from, to } => {
                sc.sync(from, to)?;
                Ok(ScriptOutput::Sync {
                    from,
                    to,
                    ledger_len: sc.observer(to).ledger().len(),
                })
            }
            ScriptEvent::Describe { observer, pair, subsystem } => Ok(ScriptOutput::Describe {
                observer,
                pair,
                subsystem,
                density: sc.describe(observer, pair, subsystem)?,
            }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_identity() -> ComplexMatrix {
        ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0))
    }

    fn approx(a: [C64; 4], b: [f64; 4]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - C64::new(y, 0.0)).norm() < 1e-12)
    }

    #[test]
    fn plus_state_expansions_agree() {
        let h = FRAC_1_SQRT_2;
        let pair = make_epr_pair();
        assert!(approx(pair.expansion(Axis::Z), [h, 0.0, 0.0, h]));
        assert!(approx(pair.expansion(Axis::X), [h, 0.0, 0.0, h]));
    }

    #[test]
    fn minus_state_expansions_document_the_sign_discrepancy() {
        // (|uu> - |dd>)/sqrt2 expands to (|lr> + |rl>)/sqrt2, not (|ll> - |rr>)/sqrt2.
        let h = FRAC_1_SQRT_2;
        let pair = EprPair::new(BellSign::Minus);
        assert!(approx(pair.expansion(Axis::Z), [h, 0.0, 0.0, -h]));
        assert!(approx(pair.expansion(Axis::X), [0.0, h, h, 0.0]));
        assert!(!approx(pair.expansion(Axis::X), [h, 0.0, 0.0, -h]));
    }

    #[test]
    fn reduced_densities_are_maximally_mixed() {
        let alice = EprScenario::new(1, 0);
        for s in [Subsystem::Alpha, Subsystem::Beta] {
            assert!(alice.describe(Party::Alice, 0, s).unwrap().max_abs_diff(&half_identity()) < 1e-12);
            assert!(alice.describe(Party::Bob, 0, s).unwrap().max_abs_diff(&half_identity()) < 1e-12);
        }
    }

    #[test]
    fn double_measurement_rejected() {
        let mut pair = make_epr_pair();
        local_measure(&mut pair, Party::Alice, Axis::Z, 1).unwrap();
        assert!(matches!(local_measure(&mut pair, Party::Alice, Axis::X, 2), Err(Error::Scenario(_))));
    }

    /// Seed whose first Alice Z outcome is up.
    fn up_scenario() -> EprScenario {
        (0..)
            .map(|seed| {
                let mut sc = EprScenario::new(1, seed);
                let rec = sc.measure(Party::Alice, 0, Axis::Z).unwrap();
                (sc, rec)
            })
            .find(|(_, rec)| rec.result == SpinResult::Up)
            .unwrap()
            .0
    }

    #[test]
    fn observer_relative_descriptions() {
        let mut sc = up_scenario();
        let beta_up = SpinResult::Up.vector().projector();
        assert!(sc.describe(Party::Alice, 0, Subsystem::Beta).unwrap().max_abs_diff(&beta_up) < 1e-12);
        assert!((sc.observer(Party::Alice).predict(0, Party::Bob, Axis::Z)[0] - 1.0).abs() < 1e-12);
        assert!(sc.describe(Party::Bob, 0, Subsystem::Beta).unwrap().max_abs_diff(&half_identity()) < 1e-12);
        assert!((sc.observer(Party::Bob).predict(0, Party::Bob, Axis::Z)[0] - 0.5).abs() < 1e-12);
        // After Z up, an X measurement on beta is a fair coin.
        let [l, r] = sc.observer(Party::Alice).predict(0, Party::Bob, Axis::X);
        assert!((l - 0.5).abs() < 1e-12 && (r - 0.5).abs() < 1e-12);

        sc.sync(Party::Alice, Party::Bob).unwrap();
        let uu = crate::linalg::tensor_vector(&SpinResult::Up.vector(), &SpinResult::Up.vector());
        let bob = sc.observer(Party::Bob).description(0).amplitudes().clone();
        assert!(bob.max_abs_diff_up_to_phase(&uu) < 1e-12);
        let before = sc.observer(Party::Bob).clone();
        sc.sync(Party::Alice, Party::Bob).unwrap();
        assert_eq!(sc.observer(Party::Bob), &before);
    }

    #[test]
    fn empty_sync_is_a_no_op() {
        let mut sc = EprScenario::new(2, 3);
        let before = sc.observer(Party::Bob).clone();
        sc.sync(Party::Alice, Party::Bob).unwrap();
        assert_eq!(sc.observer(Party::Bob), &before);
    }

    #[test]
    fn conflicting_records_rejected() {
        let initial = vec![make_epr_pair().initial_state().clone()];
        let mut a = Observer::new("a", Party::Alice, initial.clone());
        let mut b = Observer::new("b", Party::Bob, initial);
        a.record(OutcomeRecord::new(0, Party::Alice, SpinResult::Up, 0)).unwrap();
        b.record(OutcomeRecord::new(0, Party::Alice, SpinResult::Down, 0)).unwrap();
        assert!(matches!(synchronize(&a, &b), Err(Error::Consistency(_))));
    }

    #[test]
    fn incompatible_axis_rejected() {
        let mut o = Observer::new("a", Party::Alice, vec![make_epr_pair().initial_state().clone()]);
        let mut rec = OutcomeRecord::new(0, Party::Alice, SpinResult::Up, 0);
        rec.axis = Axis::X;
        assert!(matches!(o.record(rec), Err(Error::Scenario(_))));
    }

    #[test]
    fn full_sync_matches_oracle() {
        let mut sc = EprScenario::new(5, 42);
        let plan = [(Party::Alice, 0, Axis::Z), (Party::Bob, 1, Axis::X), (Party::Alice, 2, Axis::X), (Party::Bob, 2, Axis::Z)];
        for (party, pair, axis) in plan {
            sc.measure(party, pair, axis).unwrap();
        }
        let oracle = super_observer_oracle(&sc);
        let differs = (0..5).any(|k| {
            sc.observer(Party::Bob)
                .description(k)
                .amplitudes()
                .max_abs_diff_up_to_phase(oracle[k].amplitudes())
                > 1e-6
        });
        assert!(differs);
        sc.sync(Party::Alice, Party::Bob).unwrap();
        sc.sync(Party::Bob, Party::Alice).unwrap();
        for party in [Party::Alice, Party::Bob] {
            let obs = sc.observer(party);
            assert!(obs.consistency_defect().unwrap() < 1e-10);
            for k in 0..5 {
                let d = obs.describe(k, Subsystem::Both).unwrap();
                assert!(d.max_abs_diff(&oracle[k].density()) < 1e-12);
            }
        }
    }

    #[test]
    fn no_signaling_on_average() {
        for axis in [Axis::Z, Axis::X] {
            let pair = make_epr_pair();
            let mut avg = ComplexMatrix::zeros(2, 2);
            for (_, p, post) in pair.branches(Party::Alice, axis) {
                let beta = partial_trace(&post.density(), 2, 2, TracedSide::S).unwrap();
                avg = avg + beta.scale(C64::new(p, 0.0));
            }
            assert!(avg.max_abs_diff(&half_identity()) < 1e-12);
        }
    }

    #[test]
    fn sequence_experiments() {
        for schedule in [AxisSchedule::AllZ, AxisSchedule::RandomShared, AxisSchedule::Explicit(vec![Axis::X, Axis::Z])] {
            let rep = run_sequence_experiment(1000, &schedule, 7).unwrap();
            assert_eq!(rep.match_fraction, 1.0);
            for f in [rep.alice_plus_fraction, rep.bob_plus_fraction] {
                // 5 sigma for n = 1000 is 0.079
                assert!((f - 0.5).abs() < 5.0 * (0.25f64 / 1000.0).sqrt(), "{f}");
            }
        }
        let rep = run_sequence_experiment(
            1000,
            &AxisSchedule::Mismatched {
                alice: Axis::Z,
                bob: Axis::X,
            },
            7,
        )
        .unwrap();
        assert!((0.45..=0.55).contains(&rep.match_fraction), "{}", rep.match_fraction);
    }

    #[test]
    fn minus_state_anticorrelates_along_x() {
        let mut sc = EprScenario::with_sign(200, 1, BellSign::Minus);
        for k in 0..200 {
            let a = sc.measure(Party::Alice, k, Axis::X).unwrap();
            let b = sc.measure(Party::Bob, k, Axis::X).unwrap();
            assert_ne!(a.result, b.result);
        }
    }

    #[test]
    fn sequence_is_deterministic() {
        let a = run_sequence_experiment(300, &AxisSchedule::RandomShared, 9).unwrap();
        let b = run_sequence_experiment(300, &AxisSchedule::RandomShared, 9).unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert!(a.to_csv().unwrap().starts_with("pair_index,axis,alice_result,bob_result,matched\n"));
    }

    #[test]
    fn script_round_trip() {
        let events: Vec<ScriptEvent> = serde_json::from_str(
            r#"[{"op":"measure","party":"alice","pair":0,"axis":"Z"},
                {"op":"describe","observer":"bob","pair":0,"subsystem":"beta"},
                {"op":"sync","from":"alice","to":"bob"},
                {"op":"describe","observer":"bob","pair":0,"subsystem":"beta"}]"#,
        )
        .unwrap();
        let out = run_script(1, &events, 0).unwrap();
        assert_eq!(out.len(), 4);
        let ScriptOutput::Describe { density, .. } = &out[1] else { panic!() };
        assert!(density.max_abs_diff(&half_identity()) < 1e-12);
        let ScriptOutput::Describe { density, .. } = &out[3] else { panic!() };
        assert!((density.trace().re - 1.0).abs() < 1e-12 && (density.get(0, 0).re - 0.5).abs() > 0.4);
    }
}
