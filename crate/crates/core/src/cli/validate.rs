//! Schema and numeric checks on scenario files, run before anything executes.
//!
//! Every violation is collected with the dotted path of the offending field,
//! so a single run reports all problems at once.

use crate::epr::{AxisSchedule, ScriptEvent};
use crate::io::{MatrixJson, VectorJson};
use crate::linalg::{check_density, ComplexMatrix, ComplexVector};
use crate::policy::NumericPolicy;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// Whether a violation is structural or numerical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    /// Missing, unknown or mistyped fields and inconsistent dimensions.
    Schema,
    /// Well-formed data that breaks a numeric invariant (unitarity, norm, positivity).
    Contract,
}

/// One schema or contract violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub category: Category,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Checks a parsed scenario file and returns every violation found.
pub fn validate_value(v: &Value, policy: &NumericPolicy) -> Vec<Diagnostic> {
    let mut c = Checker {
        diags: Vec::new(),
        policy,
    };
    c.scenario(v);
    c.diags
}

struct Checker<'p> {
    diags: Vec<Diagnostic>,
    policy: &'p NumericPolicy,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl Checker<'_> {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            field: field.into(),
            category: Category::Schema,
            message: message.into(),
        });
    }

    fn push_contract(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            field: field.into(),
            category: Category::Contract,
            message: message.into(),
        });
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Map<String, Value>> {
        let obj = v.as_object();
        if obj.is_none() {
            self.push(if path.is_empty() { "<root>" } else { path }, "expected a JSON object");
        }
        obj
    }

    /// Reports missing required keys and unknown keys.
    fn keys(&mut self, obj: &Map<String, Value>, path: &str, required: &[&str], optional: &[&str]) {
        for key in required {
            if !obj.contains_key(*key) {
                self.push(join(path, key), "missing required field");
            }
        }
        for key in obj.keys() {
            if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
                self.push(join(path, key), "unknown field");
            }
        }
    }

    fn uint(&mut self, v: &Value, path: &str) -> Option<u64> {
        let n = v.as_u64();
        if n.is_none() {
            self.push(path, "expected a nonnegative integer");
        }
        n
    }

    fn typed<T: DeserializeOwned>(&mut self, v: &Value, path: &str, what: &str) -> Option<T> {
        match serde_json::from_value::<T>(v.clone()) {
            Ok(t) => Some(t),
            Err(e) => {
                self.push(path, format!("invalid {what}: {e}"));
                None
            }
        }
    }

    fn matrix(&mut self, v: &Value, path: &str) -> Option<ComplexMatrix> {
        let j: MatrixJson = self.typed(v, path, "matrix")?;
        match j.to_matrix() {
            Ok(m) => Some(m),
            Err(e) => {
                self.push(path, e.to_string());
                None
            }
        }
    }

    fn vector(&mut self, v: &Value, path: &str) -> Option<ComplexVector> {
        let j: VectorJson = self.typed(v, path, "vector")?;
        match j.to_vector() {
            Ok(x) => Some(x),
            Err(e) => {
                self.push(path, e.to_string());
                None
            }
        }
    }

    fn unit_vector(&mut self, v: &Value, path: &str) -> Option<ComplexVector> {
        let x = self.vector(v, path)?;
        let dev = (x.norm() - 1.0).abs();
        if dev > self.policy.normalization_tol {
            self.push_contract(
                path,
                format!(
                    "not unit norm: | ||v|| - 1 | = {dev:e} exceeds normalization_tol = {:e}",
                    self.policy.normalization_tol
                ),
            );
            return None;
        }
        Some(x)
    }

    fn unitary(&mut self, v: &Value, path: &str) -> Option<ComplexMatrix> {
        let u = self.matrix(v, path)?;
        if !u.is_square() {
            self.push(path, format!("expected a square matrix, got {}x{}", u.rows(), u.cols()));
            return None;
        }
        let defect = u.unitarity_defect();
        if defect > self.policy.unitary_tol {
            self.push_contract(
                path,
                format!(
                    "not unitary: max |U^dagger U - I| = {defect:e} exceeds unitary_tol = {:e}",
                    self.policy.unitary_tol
                ),
            );
            return None;
        }
        Some(u)
    }

    fn density(&mut self, v: &Value, path: &str) -> Option<ComplexMatrix> {
        let rho = self.matrix(v, path)?;
        if let Err(e) = check_density(&rho, self.policy) {
            self.push_contract(path, e.to_string());
            return None;
        }
        Some(rho)
    }

    fn pair_limit(&mut self, n: u64, path: &str) {
        if n > self.policy.max_entries as u64 {
            self.push(path, format!("{n} pairs exceeds the size limit max_entries = {}", self.policy.max_entries));
        }
    }

    fn scenario(&mut self, v: &Value) {
        let Some(obj) = self.object(v, "") else { return };
        self.keys(obj, "", &["version", "kind", "payload"], &["seed"]);
        if let Some(version) = obj.get("version") {
            if version.as_u64() != Some(1) {
                self.push("version", format!("unsupported version {version}, expected 1"));
            }
        }
        if let Some(seed) = obj.get("seed") {
            self.uint(seed, "seed");
        }
        let kind = obj.get("kind").map(|k| k.as_str());
        let Some(payload) = obj.get("payload") else { return };
        match kind {
            Some(Some("measure")) => self.measure(payload),
            Some(Some("epr")) => self.epr(payload),
            Some(Some("channel")) => self.channel(payload),
            Some(Some("entropy-report")) => self.entropy_report(payload),
            Some(_) => self.push("kind", "expected one of \"measure\", \"epr\", \"channel\", \"entropy-report\""),
            None => {}
        }
    }

    fn measure(&mut self, v: &Value) {
        let p = "payload";
        let Some(obj) = self.object(v, p) else { return };
        self.keys(obj, p, &["unitary", "outcome"], &["psi0", "r0", "ready_pointer", "seed"]);
        let u = obj.get("unitary").and_then(|u| self.unitary(u, "payload.unitary"));
        let ready = obj
            .get("ready_pointer")
            .and_then(|r| self.uint(r, "payload.ready_pointer"))
            .unwrap_or(0);
        if let Some(seed) = obj.get("seed") {
            self.uint(seed, "payload.seed");
        }
        // system and apparatus dimensions, when determinable
        let dims = match (obj.get("psi0"), obj.get("r0")) {
            (Some(_), Some(_)) => {
                self.push("payload.r0", "give either \"psi0\" or \"r0\", not both");
                None
            }
            (None, None) => {
                self.push("payload.psi0", "missing required field (or give \"r0\")");
                None
            }
            (Some(psi), None) => {
                let psi = self.unit_vector(psi, "payload.psi0");
                match (psi, &u) {
                    (Some(psi), Some(u)) if u.rows() % psi.dim() != 0 => {
                        self.push(
                            "payload.unitary",
                            format!("dimension {} is not a multiple of the system dimension {}", u.rows(), psi.dim()),
                        );
                        None
                    }
                    (Some(psi), Some(u)) => Some((psi.dim(), u.rows() / psi.dim())),
                    _ => None,
                }
            }
            (None, Some(r0)) => {
                let r0 = self.matrix(r0, "payload.r0");
                match (r0, &u) {
                    (Some(r0), Some(u)) if r0.rows() * r0.cols() != u.rows() => {
                        self.push(
                            "payload.unitary",
                            format!("dimension {} does not match the {}x{} relational matrix", u.rows(), r0.rows(), r0.cols()),
                        );
                        None
                    }
                    (Some(r0), _) if r0.frobenius_norm() == 0.0 => {
                        self.push_contract("payload.r0", "relational matrix is identically zero");
                        None
                    }
                    (Some(r0), Some(_)) => Some((r0.rows(), r0.cols())),
                    _ => None,
                }
            }
        };
        if let Some((_, m)) = dims {
            if ready as usize >= m {
                self.push("payload.ready_pointer", format!("{ready} is out of range for apparatus dimension {m}"));
            }
        }
        match obj.get("outcome") {
            Some(Value::String(s)) if s == "sample" => {}
            Some(Value::Number(n)) => match (n.as_u64(), dims) {
                (Some(k), Some((_, m))) if k as usize >= m => {
                    self.push("payload.outcome", format!("{k} is out of range for apparatus dimension {m}"));
                }
                (Some(_), _) => {}
                (None, _) => self.push("payload.outcome", "expected a nonnegative integer or \"sample\""),
            },
            Some(_) => self.push("payload.outcome", "expected a nonnegative integer or \"sample\""),
            None => {}
        }
    }

    fn epr(&mut self, v: &Value) {
        let p = "payload";
        let Some(obj) = self.object(v, p) else { return };
        if obj.contains_key("n") || obj.contains_key("schedule") {
            self.keys(obj, p, &["n", "schedule"], &[]);
            if let Some(n) = obj.get("n").and_then(|n| self.uint(n, "payload.n")) {
                if n == 0 {
                    self.push("payload.n", "needs at least one pair");
                }
                self.pair_limit(n, "payload.n");
            }
            if let Some(s) = obj.get("schedule") {
                if let Some(AxisSchedule::Explicit(list)) = self.typed::<AxisSchedule>(s, "payload.schedule", "axis schedule") {
                    if list.is_empty() {
                        self.push("payload.schedule", "explicit schedule is empty");
                    }
                }
            }
        } else if obj.contains_key("pairs") || obj.contains_key("events") {
            self.keys(obj, p, &["pairs", "events"], &[]);
            let pairs = obj.get("pairs").and_then(|n| self.uint(n, "payload.pairs"));
            if let Some(n) = pairs {
                self.pair_limit(n, "payload.pairs");
            }
            if let Some(events) = obj.get("events") {
                let Some(list) = events.as_array() else {
                    self.push("payload.events", "expected an array of events");
                    return;
                };
                for (i, ev) in list.iter().enumerate() {
                    let path = format!("payload.events[{i}]");
                    let Some(ev) = self.typed::<ScriptEvent>(ev, &path, "event") else { continue };
                    let pair = match ev {
                        ScriptEvent::Measure { pair, .. } | ScriptEvent::Describe { pair, .. } => Some(pair),
                        ScriptEvent::Sync { .. } => None,
                    };
                    if let (Some(pair), Some(pairs)) = (pair, pairs) {
                        if pair as u64 >= pairs {
                            self.push(format!("{path}.pair"), format!("{pair} is out of range for {pairs} pairs"));
                        }
                    }
                }
            }
        } else {
            self.push(p, "expected either \"n\" and \"schedule\" or \"pairs\" and \"events\"");
        }
    }

    fn channel(&mut self, v: &Value) {
        let p = "payload";
        let Some(obj) = self.object(v, p) else { return };
        if obj.contains_key("kraus") {
            self.keys(obj, p, &["kraus"], &[]);
            let Some(list) = obj["kraus"].as_array() else {
                self.push("payload.kraus", "expected an array of matrices");
                return;
            };
            if list.is_empty() {
                self.push("payload.kraus", "needs at least one operator");
            }
            let mut dim = None;
            for (i, m) in list.iter().enumerate() {
                let path = format!("payload.kraus[{i}]");
                let Some(m) = self.matrix(m, &path) else { continue };
                if !m.is_square() {
                    self.push(&path, format!("expected a square matrix, got {}x{}", m.rows(), m.cols()));
                } else if *dim.get_or_insert(m.rows()) != m.rows() {
                    self.push(&path, format!("size {} differs from the first operator's {}", m.rows(), dim.unwrap_or(0)));
                }
            }
        } else {
            self.keys(obj, p, &["unitary", "env_state"], &[]);
            let u = obj.get("unitary").and_then(|u| self.unitary(u, "payload.unitary"));
            let env_dim = obj.get("env_state").and_then(|e| {
                if e.get("n").is_some() {
                    self.density(e, "payload.env_state").map(|rho| rho.rows())
                } else {
                    self.unit_vector(e, "payload.env_state").map(|v| v.dim())
                }
            });
            if let (Some(u), Some(d)) = (u, env_dim) {
                if u.rows() % d != 0 {
                    self.push(
                        "payload.unitary",
                        format!("dimension {} is not a multiple of the environment dimension {d}", u.rows()),
                    );
                }
            }
        }
    }

    fn entropy_report(&mut self, v: &Value) {
        let p = "payload";
        let Some(obj) = self.object(v, p) else { return };
        if obj.contains_key("r0") {
            self.keys(obj, p, &["r0"], &[]);
            if let Some(r0) = self.matrix(&obj["r0"], "payload.r0") {
                if r0.frobenius_norm() == 0.0 {
                    self.push_contract("payload.r0", "relational matrix is identically zero");
                }
            }
        } else {
            self.keys(obj, p, &["rho", "dim_s", "dim_a"], &[]);
            let rho = obj.get("rho").and_then(|r| self.density(r, "payload.rho"));
            let ds = obj.get("dim_s").and_then(|d| self.uint(d, "payload.dim_s"));
            let da = obj.get("dim_a").and_then(|d| self.uint(d, "payload.dim_a"));
            if let (Some(rho), Some(ds), Some(da)) = (rho, ds, da) {
                if ds.checked_mul(da) != Some(rho.rows() as u64) {
                    self.push(
                        "payload.dim_s",
                        format!("dim_s = {ds} and dim_a = {da} do not match the {}x{} density", rho.rows(), rho.cols()),
                    );
                }
            }
        }
    }
}
