use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::grid::Grid;
use crate::rng::RNG_ALGORITHM;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub d: usize,
    pub n: usize,
    pub length: f64,
}

impl From<&Grid> for GridMeta {
    fn from(g: &Grid) -> Self {
        Self {
            d: g.dim(),
            n: g.points_per_axis(),
            length: g.side_length(),
        }
    }
}

/// Outcome of one verification.
///
/// `measured` is compared against `bound`; what "compared" means is recorded
/// by the producing check (usually `measured ≤ bound`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub params: Map<String, Value>,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    pub seed: u64,
    pub grid: Option<GridMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, grid: Option<&Grid>, seed: u64) -> Self {
        let mut params = Map::new();
        params.insert("rng".into(), Value::from(RNG_ALGORITHM));
        Self {
            check: check.into(),
            params,
            measured: 0.0,
            bound: 0.0,
            pass: false,
            seed,
            grid: grid.map(GridMeta::from),
            witness: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.into(), value.into());
    }

    /// Pass iff `measured ≤ bound` (NaN fails).
    pub fn at_most(mut self, measured: f64, bound: f64) -> Self {
        self.measured = measured;
        self.bound = bound;
        self.pass = measured <= bound;
        self
    }

    /// Explicit outcome for checks that are not a single upper bound.
    pub fn outcome(mut self, measured: f64, bound: f64, pass: bool) -> Self {
        self.measured = measured;
        self.bound = bound;
        self.pass = pass && !measured.is_nan();
        self
    }

    pub fn witness(mut self, id: impl Into<String>) -> Self {
        self.witness = Some(id.into());
        self
    }
}

/// JSON number for a possibly non-finite float (`"inf"`, `"-inf"`, `"nan"`
/// as strings).
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}
