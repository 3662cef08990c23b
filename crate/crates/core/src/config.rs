//! Run configuration shared by every subcommand; loadable from a JSON file
//! and overridden by command-line flags.

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraKind;
use crate::error::{Error, Result};
use crate::forms::AdaptConfig;
use crate::verify::DEFAULT_SEED;

/// The parameter algebra: a built-in kind with (m, N), or a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgebraChoice {
    pub kind: AlgebraKind,
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

impl Default for AlgebraChoice {
    fn default() -> Self {
        AlgebraChoice { kind: AlgebraKind::TruncatedPolynomial, m: 1, n: 2, file: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Named group presentation.
    pub preset: String,
    pub algebra: AlgebraChoice,
    /// Deformation directions `h1:<i>` or `h1:<i>@<b>` (b = ideal basis index).
    pub directions: Vec<String>,
    /// Report exact checks only as exact (no floating tolerance).
    pub exact: bool,
    /// Floating tolerance for residual checks.
    pub tol: f64,
    /// Coset bound B of the Eisenstein sum.
    pub bound: i64,
    /// q-series truncation order M.
    pub m: usize,
    /// Height Y of the collocation line.
    pub height: f64,
    /// Number of collocation points.
    pub points: usize,
    pub seed: u64,
    pub threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let a = AdaptConfig::default();
        RunConfig {
            preset: "sl2z".into(),
            algebra: AlgebraChoice::default(),
            directions: vec!["h1:0".into()],
            exact: false,
            tol: 1e-8,
            bound: 5000,
            m: a.m,
            height: a.height,
            points: a.points,
            seed: DEFAULT_SEED,
            threads: 1,
            out: None,
            verbose: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Precondition("tolerance must be positive".into()));
        }
        if self.bound < 1 || self.m < 1 || self.points < 1 || self.threads < 1 {
            return Err(Error::Precondition("B, M, points and threads must be ≥ 1".into()));
        }
        if !(self.height > 0.0 && self.height < 3f64.sqrt() / 2.0) {
            return Err(Error::Precondition("sample height must lie in (0, √3/2)".into()));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(s).map_err(|e| Error::Precondition(format!("bad config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn adapt_config(&self) -> AdaptConfig {
        AdaptConfig { m: self.m, points: self.points, height: self.height, ..AdaptConfig::default() }
    }
}
