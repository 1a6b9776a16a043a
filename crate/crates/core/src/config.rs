//! JSON parameter files.
//!
//! ```json
//! {"E": 1.0, "blocks": [{"lambda": [1.4142135623730951, 0.0], "gamma": [1.0, 0.0]}]}
//! ```
//!
//! Only the block seeds are stored; the full `4N` arrays are always derived.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::C64;
use crate::params::{expand_blocks, BlockSeed, ParameterSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEntry {
    pub lambda: [f64; 2],
    pub gamma: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterFile {
    #[serde(rename = "E")]
    pub energy: f64,
    pub blocks: Vec<BlockEntry>,
}

impl ParameterFile {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn seeds(&self) -> Vec<BlockSeed> {
        self.blocks
            .iter()
            .map(|b| {
                BlockSeed::new(
                    C64::new(b.lambda[0], b.lambda[1]),
                    C64::new(b.gamma[0], b.gamma[1]),
                )
            })
            .collect()
    }

    /// Expanded set, constraints unchecked (for reporting violations).
    pub fn to_parameter_set_unchecked(&self) -> ParameterSet {
        ParameterSet::expand_unchecked(self.energy, &self.seeds())
    }

    pub fn to_parameter_set(&self) -> Result<ParameterSet> {
        expand_blocks(self.energy, &self.seeds())
    }

    pub fn from_seeds(energy: f64, seeds: &[BlockSeed]) -> Self {
        Self {
            energy,
            blocks: seeds
                .iter()
                .map(|s| BlockEntry {
                    lambda: [s.lambda.re, s.lambda.im],
                    gamma: [s.gamma.re, s.gamma.im],
                })
                .collect(),
        }
    }
}
