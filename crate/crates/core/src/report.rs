use serde::{Deserialize, Serialize};

/// Outcome of one axiom over a batch of generated instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomEntry {
    pub name: String,
    pub pass: bool,
    /// Largest amount by which an instance missed the axiom (0 when every
    /// instance satisfied it exactly); `inf` for unbounded misses.
    #[serde(with = "crate::value::extended")]
    pub worst_violation: f64,
    pub checked: usize,
    pub skipped: usize,
    /// Description of the instance with the worst violation.
    pub witness: Option<String>,
}

/// Per-axiom results of a seeded property suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub suite: String,
    pub seed: u64,
    pub dim: usize,
    pub instances: usize,
    pub tolerance: f64,
    pub entries: Vec<AxiomEntry>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn entry(&self, name: &str) -> Option<&AxiomEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn worst_violation(&self) -> f64 {
        self.entries.iter().map(|e| e.worst_violation).fold(0.0, f64::max)
    }
}

/// Accumulates violations for one axiom.
#[derive(Clone, Debug)]
pub(crate) struct Tally {
    name: &'static str,
    worst: f64,
    checked: usize,
    skipped: usize,
    witness: Option<String>,
}

impl Tally {
    pub(crate) fn new(name: &'static str) -> Self {
        Tally {
            name,
            worst: 0.0,
            checked: 0,
            skipped: 0,
            witness: None,
        }
    }

    /// Records one check; `violation <= 0` means satisfied. The witness is
    /// only formatted when it becomes the worst so far.
    pub(crate) fn record(&mut self, violation: f64, witness: impl FnOnce() -> String) {
        self.checked += 1;
        let v = if violation.is_nan() { f64::INFINITY } else { violation };
        if v > self.worst {
            self.worst = v;
            self.witness = Some(witness());
        }
    }

    pub(crate) fn skip(&mut self) {
        self.skipped += 1;
    }

    pub(crate) fn finish(self, tol: f64) -> AxiomEntry {
        AxiomEntry {
            name: self.name.to_string(),
            pass: self.worst <= tol,
            worst_violation: self.worst,
            checked: self.checked,
            skipped: self.skipped,
            witness: self.witness,
        }
    }
}
