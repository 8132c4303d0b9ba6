use serde::{Deserialize, Serialize};

use super::{BobPolicy, CommitmentScheme};
use crate::error::{QbcError, Result};
use crate::qcore::{StateVector, UnitaryOperator};
use crate::serial::{matrix_from_rows, matrix_rows, vector_from_pairs, vector_pairs, ComplexPair};

pub const SCHEME_SCHEMA_VERSION: u32 = 1;

/// On-disk form of a [`CommitmentScheme`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDocument {
    pub schema_version: u32,
    pub name: String,
    /// `[d_A, d_B]`.
    pub dims: [usize; 2],
    /// Row-major `U_AB`, `d_A * d_B` rows.
    pub unitary: Vec<Vec<ComplexPair>>,
    /// Alice's encodings of bit 0 and bit 1.
    pub encodings: [Vec<ComplexPair>; 2],
    pub bob_policy: PolicyDocument,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicyDocument {
    Fixed { state: Vec<ComplexPair> },
    RandomHaar,
}

pub(super) fn builtin_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "phase" => include_str!("../../schemes/phase.json"),
        "choi-nottp" => include_str!("../../schemes/choi-nottp.json"),
        "product" => include_str!("../../schemes/product.json"),
        "bobcopy" => include_str!("../../schemes/bobcopy.json"),
        _ => return None,
    })
}

fn state(field: &str, pairs: &[ComplexPair], dim: usize) -> Result<StateVector> {
    StateVector::new(vector_from_pairs(pairs), vec![dim]).map_err(|e| QbcError::Parse(format!("{field}: {e}")))
}

impl SchemeDocument {
    pub fn into_scheme(self) -> Result<CommitmentScheme> {
        if self.schema_version != SCHEME_SCHEMA_VERSION {
            return Err(QbcError::Parse(format!(
                "unsupported schema_version {} (expected {SCHEME_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let [d_a, d_b] = self.dims;
        if d_a == 0 || d_b == 0 {
            return Err(QbcError::Parse("dims must be positive".into()));
        }
        let matrix = matrix_from_rows(&self.unitary)?;
        if matrix.nrows() != d_a * d_b || matrix.ncols() != d_a * d_b {
            return Err(QbcError::Parse(format!(
                "unitary: expected {0}x{0} matrix, found {1}x{2}",
                d_a * d_b,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let unitary = UnitaryOperator::new(matrix).map_err(|e| QbcError::Parse(format!("unitary: {e}")))?;
        let [e0, e1] = &self.encodings;
        let encodings = [state("encodings[0]", e0, d_a)?, state("encodings[1]", e1, d_a)?];
        let policy = match &self.bob_policy {
            PolicyDocument::Fixed { state: s } => BobPolicy::Fixed(state("bob_policy.state", s, d_b)?),
            PolicyDocument::RandomHaar => BobPolicy::RandomHaar,
        };
        CommitmentScheme::new(self.name, (d_a, d_b), unitary, encodings, policy)
    }
}

impl CommitmentScheme {
    pub fn to_document(&self) -> SchemeDocument {
        let (d_a, d_b) = self.dims();
        SchemeDocument {
            schema_version: SCHEME_SCHEMA_VERSION,
            name: self.name.clone(),
            dims: [d_a, d_b],
            unitary: matrix_rows(self.unitary.matrix()),
            encodings: [vector_pairs(self.encodings[0].amplitudes()), vector_pairs(self.encodings[1].amplitudes())],
            bob_policy: match &self.bob_policy {
                BobPolicy::Fixed(s) => PolicyDocument::Fixed { state: vector_pairs(s.amplitudes()) },
                BobPolicy::RandomHaar => PolicyDocument::RandomHaar,
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SchemeDocument = serde_json::from_str(text).map_err(|e| QbcError::Parse(e.to_string()))?;
        doc.into_scheme()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("scheme documents always serialize")
    }
}
