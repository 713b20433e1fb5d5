//! Balancing and Lucas-balancing numbers that factor as a product of two
//! k-generalized Fibonacci numbers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub mod error;
pub mod expr;
pub mod linforms;
pub mod numerics;
pub mod reduction;
pub mod search;
pub mod sequences;

pub use error::{Error, Result};

/// `B_l = F_n F_m` or `C_l = F_n F_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Balancing,
    Lucas,
}

impl Equation {
    pub const ALL: [Equation; 2] = [Equation::Balancing, Equation::Lucas];

    /// Smallest `k` the equation is studied for.
    pub fn min_k(self) -> u32 {
        match self {
            Equation::Balancing => 3,
            Equation::Lucas => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Equation::Balancing => 'B',
            Equation::Lucas => 'C',
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equation::Balancing => "balancing",
            Equation::Lucas => "lucas",
        })
    }
}

impl FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "b" | "1" | "balancing" => Ok(Equation::Balancing),
            "c" | "2" | "lucas" | "lucas-balancing" => Ok(Equation::Lucas),
            _ => Err(Error::Parse(format!(
                "unknown equation {s:?} (expected B or C)"
            ))),
        }
    }
}
