//! Run configuration: budgets, tolerances and the seed.
//!
//! The config file is flat `key = value` text, one setting per line, using the
//! field names of [`RunConfig`]. Lines starting with `#` are comments. Omitted
//! keys keep their defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Mantissa bits trusted in float mode; float expansions use an error
    /// radius of `2^-precision_bits` per coordinate.
    pub precision_bits: u32,
    pub seed: u64,
    pub max_words: u64,
    pub max_digits: usize,
    pub horizon: u64,
    pub bisection_tol: f64,
    pub ratio_tol: f64,
    pub float_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: 48,
            seed: 0,
            max_words: 1 << 24,
            max_digits: crate::expansion::DEFAULT_MAX_DIGITS,
            horizon: 10_000,
            bisection_tol: 1e-3,
            ratio_tol: 0.25,
            float_tol: 1e-12,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_words == 0 || self.max_digits == 0 || self.horizon == 0 {
            return Err(Error::InvalidArgument("budgets must be positive".into()));
        }
        if !(1..=53).contains(&self.precision_bits) {
            return Err(Error::InvalidArgument(format!(
                "precision_bits = {} must be in 1..=53",
                self.precision_bits
            )));
        }
        for (name, v) in [
            ("bisection_tol", self.bisection_tol),
            ("ratio_tol", self.ratio_tol),
            ("float_tol", self.float_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// The config in file syntax.
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("flat struct serializes")
    }

    pub fn float_error_radius(&self) -> f64 {
        (-(self.precision_bits as f64)).exp2()
    }
}
