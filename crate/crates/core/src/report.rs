//! Per-check records shared by every suite.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fieldcalc::{AdChainResult, LocalBracket};
use crate::fockrep::StateVector;
use crate::loopcore::ToroidalElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// A nonzero Fock residual on one test state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateResidual {
    pub state_index: usize,
    pub vector: StateVector,
}

/// What is left after subtracting the expected value. A record passes iff
/// its residual is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum Residual {
    Local(LocalBracket),
    Chain(AdChainResult),
    Fock(Vec<StateResidual>),
    Toroidal(ToroidalElement),
    /// Human-readable descriptions of failed property instances.
    Mismatches(Vec<String>),
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        match self {
            Residual::Local(b) => b.is_zero(),
            Residual::Chain(c) => c.is_zero(),
            Residual::Fock(v) => v.iter().all(|r| r.vector.is_zero()),
            Residual::Toroidal(t) => t.is_zero(),
            Residual::Mismatches(v) => v.is_empty(),
        }
    }

    fn summary(&self) -> String {
        match self {
            Residual::Local(b) => format!(
                "{} field terms, ddelta {}",
                b.delta_part.len(),
                b.ddelta_scalar
            ),
            Residual::Chain(c) => format!("{} chain entries", c.entries().count()),
            Residual::Fock(v) => format!("{} states", v.len()),
            Residual::Toroidal(t) => format!(
                "{} loop terms, {} central terms",
                t.loop_part().len(),
                t.central().len()
            ),
            Residual::Mismatches(v) => v.first().cloned().unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub indices: Vec<i64>,
    pub status: Status,
    pub residual: Residual,
    pub ms: f64,
}

impl Record {
    pub fn new(id: impl Into<String>, indices: Vec<i64>, residual: Residual, ms: f64) -> Self {
        let status = if residual.is_zero() {
            Status::Pass
        } else {
            Status::Fail
        };
        Record {
            id: id.into(),
            indices,
            status,
            residual,
            ms,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(i64::to_string).collect();
        write!(
            f,
            "{:<10} [{}] {}",
            self.id,
            idx.join(","),
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        if !self.passed() {
            write!(f, "  ({})", self.residual.summary())?;
        }
        Ok(())
    }
}

/// Milliseconds elapsed since `start`.
pub fn elapsed_ms(start: std::time::Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
