//! Typed scenario files and their execution into reports.

use crate::epr::{run_script, run_sequence_experiment, AxisSchedule, ScriptEvent, ScriptOutput, SequenceReport};
use crate::error::{Error, Result};
use crate::info::{CompositeDensity, EntropyReport};
use crate::io::{MatrixJson, VectorJson};
use crate::linalg::ComplexVector;
use crate::measurement::{
    decompose_premeasurement_with, measure_entangled_with, measure_product_with, pointer_probabilities, process2_with,
    sample_outcome, EntropyTrajectory, PointerBasis, PremeasurementUnitary,
};
use crate::policy::NumericPolicy;
use crate::quantum_ops::{kraus_from_environment_with, ChannelReport, KrausChannel};
use crate::relational::RelationalMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::f64::consts::LN_2;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub kind: ScenarioKind,
    pub payload: Value,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Measure,
    Epr,
    Channel,
    EntropyReport,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Measure => "measure",
            ScenarioKind::Epr => "epr",
            ScenarioKind::Channel => "channel",
            ScenarioKind::EntropyReport => "entropy-report",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Nats,
    Bits,
}

impl Units {
    fn scale(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / LN_2,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasurePayload {
    psi0: Option<VectorJson>,
    r0: Option<MatrixJson>,
    unitary: MatrixJson,
    #[serde(default)]
    ready_pointer: usize,
    outcome: OutcomeChoice,
    seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum OutcomeChoice {
    Index(usize),
    Sample(SampleTag),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SampleTag {
    Sample,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum EprPayload {
    Sequence {
        n: usize,
        schedule: AxisSchedule,
    },
    Script {
        pairs: usize,
        events: Vec<ScriptEvent>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ChannelPayload {
    Kraus { kraus: Vec<MatrixJson> },
    Environment { unitary: MatrixJson, env_state: EnvState },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum EnvState {
    Mixed(MatrixJson),
    Pure(VectorJson),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ReportPayload {
    Relational { r0: MatrixJson },
    Density { rho: MatrixJson, dim_s: usize, dim_a: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    pub kind: &'static str,
    pub seed: u64,
    pub units: Units,
    pub outcome: usize,
    pub probability: f64,
    /// Probability of every pointer outcome.
    pub probabilities: Vec<f64>,
    pub post_state: ComplexVector,
    pub post_relational: RelationalMatrix,
    pub entropy_trajectory: Option<EntropyTrajectory>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScriptReport {
    pub kind: &'static str,
    pub seed: u64,
    pub pairs: usize,
    pub events: Vec<ScriptOutput>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelOutput {
    pub kind: &'static str,
    pub kraus_count: usize,
    #[serde(flatten)]
    pub report: ChannelReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyOutput {
    pub kind: &'static str,
    pub units: Units,
    #[serde(flatten)]
    pub report: EntropyReport,
}

/// Result of running one scenario.
#[derive(Clone, Debug)]
pub enum Report {
    Measure(MeasureReport),
    Sequence(SequenceReport),
    Script(ScriptReport),
    Channel(ChannelOutput),
    Entropy(EntropyOutput),
}

fn payload<T: serde::de::DeserializeOwned>(v: &Value, kind: ScenarioKind) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Scenario(format!("payload: invalid {} payload: {e}", kind.name())))
}

/// Executes a scenario. `seed_override` (from the command line) beats any seed in the file.
pub fn execute(file: &ScenarioFile, seed_override: Option<u64>, units: Units, policy: &NumericPolicy) -> Result<Report> {
    match file.kind {
        ScenarioKind::Measure => {
            let p: MeasurePayload = payload(&file.payload, file.kind)?;
            let seed = seed_override.or(p.seed).unwrap_or(file.seed);
            run_measure(&p, seed, units, policy).map(Report::Measure)
        }
        ScenarioKind::Epr => {
            let seed = seed_override.unwrap_or(file.seed);
            match payload::<EprPayload>(&file.payload, file.kind)? {
                EprPayload::Sequence { n, schedule } => run_sequence_experiment(n, &schedule, seed).map(Report::Sequence),
                EprPayload::Script { pairs, events } => Ok(Report::Script(ScriptReport {
                    kind: "epr",
                    seed,
                    pairs,
                    events: run_script(pairs, &events, seed)?,
                })),
            }
        }
        ScenarioKind::Channel => {
            let ch = match payload::<ChannelPayload>(&file.payload, file.kind)? {
                ChannelPayload::Kraus { kraus } => {
                    KrausChannel::new(kraus.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?)?
                }
                ChannelPayload::Environment { unitary, env_state } => {
                    let rho_e = match env_state {
                        EnvState::Mixed(m) => m.to_matrix()?,
                        EnvState::Pure(v) => v.to_vector()?.projector(),
                    };
                    kraus_from_environment_with(&unitary.to_matrix()?, &rho_e, policy)?
                }
            };
            Ok(Report::Channel(ChannelOutput {
                kind: "channel",
                kraus_count: ch.ops().len(),
                report: ch.verify_with(policy)?,
            }))
        }
        ScenarioKind::EntropyReport => {
            let report = match payload::<ReportPayload>(&file.payload, file.kind)? {
                ReportPayload::Relational { r0 } => EntropyReport::from_relational(&RelationalMatrix::new(r0.to_matrix()?)?),
                ReportPayload::Density { rho, dim_s, dim_a } => {
                    EntropyReport::from_density(&CompositeDensity::with_policy(rho.to_matrix()?, dim_s, dim_a, policy)?)
                }
            };
            Ok(Report::Entropy(EntropyOutput {
                kind: "entropy-report",
                units,
                report: match units {
                    Units::Nats => report,
                    Units::Bits => report.to_bits(),
                },
            }))
        }
    }
}

fn run_measure(p: &MeasurePayload, seed: u64, units: Units, policy: &NumericPolicy) -> Result<MeasureReport> {
    let u_mat = p.unitary.to_matrix()?;
    let (record, probabilities) = match (&p.psi0, &p.r0) {
        (Some(psi0), None) => {
            let psi = psi0.to_vector()?;
            let n = psi.dim();
            let m = u_mat.rows() / n;
            let u = PremeasurementUnitary::with_policy(u_mat, n, m, p.ready_pointer, policy)?;
            let r0 = RelationalMatrix::from_product(&psi, &ComplexVector::basis(m, p.ready_pointer))?;
            let mset = decompose_premeasurement_with(&u, policy)?;
            let r_prime = process2_with(&r0, &mset, policy)?;
            let outcome = match p.outcome {
                OutcomeChoice::Index(k) => k,
                OutcomeChoice::Sample(_) => sample_outcome(&r_prime, seed),
            };
            (measure_product_with(&r0, &mset, outcome, policy)?, r_prime.apparatus_probabilities())
        }
        (None, Some(r0)) => {
            let r0 = RelationalMatrix::new(r0.to_matrix()?)?;
            let u = PremeasurementUnitary::with_policy(u_mat, r0.n(), r0.m(), p.ready_pointer, policy)?;
            let pointers = PointerBasis::computational(r0.m());
            let probabilities = pointer_probabilities(&r0, &u, &pointers)?;
            let outcome = match p.outcome {
                OutcomeChoice::Index(k) => k,
                OutcomeChoice::Sample(_) => {
                    let r_prime = u.evolve(&r0.to_state_vector())?.to_relational();
                    sample_outcome(&r_prime, seed)
                }
            };
            (measure_entangled_with(&r0, &u, &pointers, outcome, policy)?, probabilities)
        }
        _ => return Err(Error::Scenario("payload: give exactly one of \"psi0\" and \"r0\"".into())),
    };
    Ok(MeasureReport {
        kind: "measure",
        seed,
        units,
        outcome: record.outcome_m,
        probability: record.probability,
        probabilities,
        post_state: record.post_state.fix_phase(policy.eq_tol),
        post_relational: record.post_relational,
        entropy_trajectory: record.entropy_trajectory.map(|t| EntropyTrajectory {
            h0: units.scale(t.h0),
            h_mid: units.scale(t.h_mid),
            h_final: units.scale(t.h_final),
        }),
    })
}
