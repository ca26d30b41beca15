use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Occupation, SparseState};
use crate::error::{Error, Result};

/// Serialized form of a [`SparseState`]: terms sorted by occupation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub modes: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub occ: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

impl From<&SparseState> for StateJson {
    fn from(state: &SparseState) -> Self {
        StateJson {
            modes: state.modes(),
            terms: state
                .iter()
                .map(|(occ, a)| TermJson {
                    occ: occ.counts().to_vec(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<StateJson> for SparseState {
    type Error = Error;

    fn try_from(json: StateJson) -> Result<Self> {
        SparseState::from_terms(
            json.modes,
            json.terms
                .into_iter()
                .map(|t| (Occupation::new(t.occ), Complex64::new(t.re, t.im))),
        )
    }
}

impl SparseState {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StateJson::from(self)).expect("state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json: StateJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        SparseState::try_from(json)
    }
}
