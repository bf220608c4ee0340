//! T-norm aggregation operators used to combine the mass term with the
//! affinity term in the engine's attraction function.

use serde::{Deserialize, Serialize};

/// A t-norm: commutative, associative, monotone on [0,1] with identity 1.
/// Being bounded above by the minimum, `T(x, a) = 0` whenever `a = 0`,
/// which licenses skipping zero-affinity pairs in the force loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TNorm {
    #[default]
    Product,
    Minimum,
}

impl TNorm {
    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            TNorm::Product => a * b,
            TNorm::Minimum => a.min(b),
        }
    }
}

impl std::str::FromStr for TNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "product" | "prod" => Ok(TNorm::Product),
            "minimum" | "min" => Ok(TNorm::Minimum),
            other => Err(format!("unknown t-norm `{other}` (expected product|minimum)")),
        }
    }
}

impl std::fmt::Display for TNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TNorm::Product => "product",
            TNorm::Minimum => "minimum",
        })
    }
}
