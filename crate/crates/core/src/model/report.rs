use serde::Serialize;

/// The points that exhibit the worst violation of a sampled check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
    pub xi: Option<Vec<f64>>,
}

impl Witness {
    pub fn point(x: &[f64]) -> Self {
        Witness {
            x: x.to_vec(),
            y: None,
            xi: None,
        }
    }

    pub fn pair(x: &[f64], y: &[f64], xi: Option<&[f64]>) -> Self {
        Witness {
            x: x.to_vec(),
            y: Some(y.to_vec()),
            xi: xi.map(<[f64]>::to_vec),
        }
    }
}

/// Outcome of a sampled property check.
///
/// `passed` holds iff `worst_violation <= tolerance`, and a witness is kept
/// only for failures. `considered` counts the samples that produced a
/// violation value; a check with nothing to consider reports `0.0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub property: String,
    pub samples: usize,
    pub considered: usize,
    pub skipped: usize,
    pub worst_violation: f64,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    pub rng_seed: u64,
    pub passed: bool,
    pub evaluations: u64,
}

impl CheckReport {
    /// One-line human summary.
    pub fn summary(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{verdict} {} worst={:e} tol={:e} samples={} considered={} skipped={}",
            self.property,
            self.worst_violation,
            self.tolerance,
            self.samples,
            self.considered,
            self.skipped
        );
        if let Some(w) = &self.witness {
            s.push_str(&format!(" witness x={:?}", w.x));
            if let Some(y) = &w.y {
                s.push_str(&format!(" y={y:?}"));
            }
        }
        s
    }
}

/// Running worst-violation reduction. Ties keep the earliest sample.
pub(crate) struct Tracker {
    property: String,
    tolerance: f64,
    seed: u64,
    samples: usize,
    considered: usize,
    skipped: usize,
    worst: f64,
    witness: Option<Witness>,
    evaluations: u64,
}

impl Tracker {
    pub(crate) fn new(property: impl Into<String>, tolerance: f64, seed: u64) -> Self {
        Tracker {
            property: property.into(),
            tolerance,
            seed,
            samples: 0,
            considered: 0,
            skipped: 0,
            worst: f64::NEG_INFINITY,
            witness: None,
            evaluations: 0,
        }
    }

    pub(crate) fn sample(&mut self) {
        self.samples += 1;
    }

    pub(crate) fn skip(&mut self) {
        self.skipped += 1;
    }

    pub(crate) fn count_evals(&mut self, n: u64) {
        self.evaluations += n;
    }

    pub(crate) fn observe(&mut self, violation: f64, witness: impl FnOnce() -> Witness) {
        self.considered += 1;
        let v = if violation.is_nan() {
            f64::MAX
        } else {
            violation
        };
        if v > self.worst {
            self.worst = v;
            self.witness = Some(witness());
        }
    }

    pub(crate) fn finish(self) -> CheckReport {
        let worst = if self.considered == 0 {
            0.0
        } else {
            self.worst.min(f64::MAX)
        };
        let passed = worst <= self.tolerance;
        CheckReport {
            property: self.property,
            samples: self.samples,
            considered: self.considered,
            skipped: self.skipped,
            worst_violation: worst,
            witness: if passed { None } else { self.witness },
            tolerance: self.tolerance,
            rng_seed: self.seed,
            passed,
            evaluations: self.evaluations.max(1),
        }
    }
}
