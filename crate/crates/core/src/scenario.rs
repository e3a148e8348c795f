//! Versioned JSON scenarios.
//!
//! ```json
//! {"schema": "bf/1", "kind": "block",
//!  "payload": {"algebra": {"blocks": [2, 1]}, "ideal": [1], "element": [m0, m1]},
//!  "requested": ["classify"], "tolerances": {"rank": 1e-10}}
//! ```
//!
//! A toeplitz payload is the element itself:
//! `{"coeffs": {"1": [1, 0]}, "space": "unilateral", "perturbation": m}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::semisimple::{BlockAlgebra, BlockElement, IdealSpec};
use crate::toeplitz::{ToeplitzElement, DEFAULT_CIRCLE_TOL};

pub const SCHEMA: &str = "bf/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Block,
    Toeplitz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Classify,
    Spectrum,
    Decompose,
    Drazin,
    Index,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative rank threshold for invertibility and Drazin splittings.
    #[serde(default = "default_rank")]
    pub rank: f64,
    /// Distance from the unit circle below which symbol zeros are examined.
    #[serde(default = "default_circle")]
    pub circle: f64,
}

fn default_rank() -> f64 {
    DEFAULT_RANK_TOL
}

fn default_circle() -> f64 {
    DEFAULT_CIRCLE_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: DEFAULT_RANK_TOL,
            circle: DEFAULT_CIRCLE_TOL,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("rank", self.rank), ("circle", self.circle)] {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(Error::InvalidInput(format!("tolerance {name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockPayload {
    /// Optional; when present it must match the block shapes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<BlockAlgebra>,
    #[serde(default)]
    pub ideal: IdealSpec,
    pub element: BlockElement,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Block { element: BlockElement, ideal: IdealSpec },
    Toeplitz(ToeplitzElement),
}

impl Model {
    pub fn kind(&self) -> Kind {
        match self {
            Model::Block { .. } => Kind::Block,
            Model::Toeplitz(_) => Kind::Toeplitz,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema: String,
    kind: Kind,
    payload: Value,
    #[serde(default)]
    requested: Vec<Operation>,
    #[serde(default)]
    tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: Model,
    pub requested: Vec<Operation>,
    pub tolerances: Tolerances,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawScenario = serde_json::from_str(text)?;
        if raw.schema != SCHEMA {
            return Err(Error::InvalidInput(format!("unsupported schema {:?}, expected {SCHEMA:?}", raw.schema)));
        }
        raw.tolerances.validate()?;
        let model = match raw.kind {
            Kind::Block => {
                let p: BlockPayload = serde_json::from_value(raw.payload)?;
                if let Some(alg) = &p.algebra {
                    if alg != p.element.algebra() {
                        return Err(Error::ShapeMismatch(format!(
                            "algebra lists blocks {:?} but the element has {:?}",
                            alg.block_sizes(),
                            p.element.algebra().block_sizes()
                        )));
                    }
                }
                p.ideal.validate(p.element.algebra())?;
                Model::Block {
                    element: p.element,
                    ideal: p.ideal,
                }
            }
            Kind::Toeplitz => Model::Toeplitz(serde_json::from_value(raw.payload)?),
        };
        Ok(Scenario {
            model,
            requested: raw.requested,
            tolerances: raw.tolerances,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Scenario::parse(&text)
    }

    /// An empty request list admits every operation.
    pub fn requests(&self, op: Operation) -> bool {
        self.requested.is_empty() || self.requested.contains(&op)
    }

    pub fn to_json(&self) -> Value {
        let (kind, payload) = match &self.model {
            Model::Block { element, ideal } => (
                Kind::Block,
                serde_json::to_value(BlockPayload {
                    algebra: Some(element.algebra().clone()),
                    ideal: ideal.clone(),
                    element: element.clone(),
                })
                .expect("block payload serializes"),
            ),
            Model::Toeplitz(t) => (Kind::Toeplitz, serde_json::to_value(t).expect("toeplitz payload serializes")),
        };
        serde_json::json!({
            "schema": SCHEMA,
            "kind": kind,
            "payload": payload,
            "requested": self.requested,
            "tolerances": self.tolerances,
        })
    }
}
