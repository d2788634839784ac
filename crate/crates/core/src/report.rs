//! Verdicts and the evidence attached to them.

use serde::Serialize;

use crate::measure::Law;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Transient,
    NullRecurrent,
    PositiveRecurrent,
    Undetermined,
}

impl Regime {
    pub fn is_recurrent(self) -> Option<bool> {
        match self {
            Regime::Transient => Some(false),
            Regime::NullRecurrent | Regime::PositiveRecurrent => Some(true),
            Regime::Undetermined => None,
        }
    }
}

/// One numerical fact behind a verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub criterion: String,
    pub value: f64,
    pub error: f64,
    /// Which algorithm produced the value.
    pub provenance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Evidence {
    pub fn new(criterion: &str, value: f64, error: f64, provenance: &str) -> Self {
        Self {
            criterion: criterion.into(),
            value,
            error,
            provenance: provenance.into(),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Echo of an input law as seen by the engines.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputEcho {
    pub role: String,
    pub law: String,
    pub mass: f64,
    pub tail_mass: f64,
}

impl InputEcho {
    pub fn of(role: &str, law: &Law) -> Self {
        let m = law.materialize();
        Self {
            role: role.into(),
            law: law.label(),
            mass: law.total_mass(),
            tail_mass: m.tail_mass(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub regime: Regime,
    pub recurrent: Option<bool>,
    pub evidence: Vec<Evidence>,
    pub inputs: Vec<InputEcho>,
    pub tail_mass: f64,
}

impl ClassificationReport {
    pub fn new(regime: Regime, evidence: Vec<Evidence>, inputs: Vec<InputEcho>) -> Self {
        let tail_mass = inputs.iter().map(|i| i.tail_mass).sum();
        Self {
            regime,
            recurrent: regime.is_recurrent(),
            evidence,
            inputs,
            tail_mass,
        }
    }

    pub fn find(&self, criterion: &str) -> Option<&Evidence> {
        self.evidence.iter().find(|e| e.criterion == criterion)
    }
}
