use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Configuration of an Ising field: one value in {-1, +1} per lattice node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinState {
    pub values: Vec<i8>,
}

impl SpinState {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::Dataset("spin values must be -1 or +1".into()));
        }
        Ok(Self { values })
    }

    pub fn constant(len: usize, value: i8) -> Self {
        debug_assert!(value == 1 || value == -1);
        Self { values: vec![value; len] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Configuration of a graph on `n` nodes: one value in {0, 1} per node pair,
/// in lexicographic `(i, j)` (`i < j`) order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeState {
    pub values: Vec<u8>,
}

impl EdgeState {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        if values.iter().any(|&v| v > 1) {
            return Err(Error::Dataset("edge values must be 0 or 1".into()));
        }
        Ok(Self { values })
    }

    pub fn empty(pair_count: usize) -> Self {
        Self { values: vec![0; pair_count] }
    }

    pub fn complete(pair_count: usize) -> Self {
        Self { values: vec![1; pair_count] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A latent (or observed) MRF configuration of either family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatentState {
    Spin(SpinState),
    Edge(EdgeState),
}

impl LatentState {
    pub fn len(&self) -> usize {
        match self {
            LatentState::Spin(s) => s.len(),
            LatentState::Edge(e) => e.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_spin(&self) -> Result<&SpinState> {
        match self {
            LatentState::Spin(s) => Ok(s),
            LatentState::Edge(_) => Err(Error::Dataset("expected spin state, got edge state".into())),
        }
    }

    pub fn as_edge(&self) -> Result<&EdgeState> {
        match self {
            LatentState::Edge(e) => Ok(e),
            LatentState::Spin(_) => Err(Error::Dataset("expected edge state, got spin state".into())),
        }
    }

    /// Serialises to the integer vector used in dataset files
    /// (-1/+1 for spins, 0/1 for edges).
    pub fn to_ints(&self) -> Vec<i8> {
        match self {
            LatentState::Spin(s) => s.values.clone(),
            LatentState::Edge(e) => e.values.iter().map(|&v| v as i8).collect(),
        }
    }
}

impl From<SpinState> for LatentState {
    fn from(s: SpinState) -> Self {
        LatentState::Spin(s)
    }
}

impl From<EdgeState> for LatentState {
    fn from(e: EdgeState) -> Self {
        LatentState::Edge(e)
    }
}
