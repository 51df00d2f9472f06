use crate::error::{Error, Result};

/// Default elementary-operation budget for exact enumerations.
pub const DEFAULT_OPS: f64 = 1e8;

/// Environment variable that overrides [`DEFAULT_OPS`].
pub const BUDGET_ENV: &str = "AVWC_BUDGET";

/// Operation-count budget guarding exhaustive enumerations.
///
/// Exceeding it is always an error; nothing silently falls back to sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    pub max_ops: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_ops: DEFAULT_OPS }
    }
}

impl Budget {
    pub fn new(max_ops: f64) -> Result<Self> {
        if !(max_ops > 0.0) {
            return Err(Error::OutOfRange(format!("budget must be positive, got {max_ops}")));
        }
        Ok(Self { max_ops })
    }

    /// Reads `AVWC_BUDGET`, falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(raw) => {
                let v: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| Error::OutOfRange(format!("{BUDGET_ENV}={raw} is not a number")))?;
                Self::new(v)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn check(&self, what: impl Into<String>, ops: f64) -> Result<()> {
        if ops > self.max_ops {
            Err(Error::Budget { what: what.into(), ops, budget: self.max_ops })
        } else {
            Ok(())
        }
    }
}
