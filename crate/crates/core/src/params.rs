//! Code family parameters and their validation.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which norm the codeword and distance constraints use.
///
/// `L2` codes are weighted Euclidean superimposed codes (WESCs); `L1`
/// codes are `l1`-WSCs, optionally with nonnegative entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    L2,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "l1" | "L1" => Ok(NormKind::L1),
            "l2" | "L2" => Ok(NormKind::L2),
            other => Err(Error::Parse(format!("unknown norm kind {other:?}"))),
        }
    }
}

/// The tuple defining one WSC family instance.
///
/// Codeword norms are fixed to one, so the required minimum distance `d`
/// must lie in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeParameters {
    /// Codebook size `N` (number of codewords).
    pub n: usize,
    /// Codeword length `m`.
    pub m: usize,
    /// Maximum superposition support `K`.
    pub k: usize,
    /// Required minimum superposition distance.
    pub d: f64,
    /// Weight magnitude bound: nonzero weights lie in `[-t, t] \ {0}`.
    pub t: i32,
    pub norm: NormKind,
    /// Nonnegative family (all codebook entries >= 0); `L1` only.
    pub nonneg: bool,
}

impl CodeParameters {
    /// Check every invariant, reporting all violated constraints at once.
    pub fn validate(&self) -> Result<(), Error> {
        let mut violations = Vec::new();
        if self.n < 1 {
            violations.push("N >= 1".to_string());
        }
        if self.m < 1 {
            violations.push("m >= 1".to_string());
        }
        if self.k < 1 {
            violations.push("K >= 1".to_string());
        }
        if self.t < 1 {
            violations.push("t >= 1".to_string());
        }
        if self.k > self.n {
            violations.push(format!("K <= N (got K={}, N={})", self.k, self.n));
        }
        if !(self.d > 0.0 && self.d < 1.0) {
            violations.push(format!("d in (0, 1) (got d={})", self.d));
        }
        if self.nonneg && self.norm != NormKind::L1 {
            violations.push("nonneg requires norm=l1".to_string());
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameters(violations.join("; ")))
        }
    }
}

/// Validate a parameter tuple; success iff every invariant holds.
pub fn validate_parameters(p: &CodeParameters) -> Result<(), Error> {
    p.validate()
}
