use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CrystalError {
    #[error("rank parameter e = {0} must be at least 2")]
    InvalidRank(u32),
    #[error("residue {value} is not a canonical residue mod {e}")]
    ResidueOutOfRange { value: u32, e: u32 },
    #[error("folding needs l > 2, got l = {0}")]
    FoldingRank(u32),
    #[error("folding needs an even rank, got e = {0}")]
    OddRank(u32),
    #[error("weight is not balanced at folded index {index}: {low} vs {high}")]
    Unbalanced { index: u32, low: i64, high: i64 },
    #[error("index sets differ: e = {0} vs e = {1}")]
    MixedIndexSets(u32, u32),
    #[error("position {position} carries residue {actual}, not {expected}")]
    WrongPosition { position: usize, expected: u32, actual: u32 },
    #[error("word of length {len} exceeds the depth bound {bound}")]
    DepthBound { len: usize, bound: usize },
    #[error("{0} is not a vertex of the highest-weight crystal")]
    NotKleshchev(String),
    #[error("invalid path: step {step} (letter {letter}) hits zero")]
    InvalidPath { step: usize, letter: u32 },
    #[error("operation `{0}` is not supported by this crystal model")]
    Unsupported(&'static str),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("color sets differ: {0} colors vs {1} colors")]
    ColorMismatch(u32, u32),
    #[error("color map has {got} entries, expected {expected}")]
    ColorMap { got: usize, expected: usize },
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed graph json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported graph schema version {0}")]
    Schema(u32),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("check `{name}` would visit about {estimate} states, over the budget of {budget}")]
    Infeasible { name: String, estimate: u64, budget: u64 },
    #[error("malformed counterexample: {0}")]
    Counterexample(String),
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
