//! Certified arbitrary-precision real arithmetic.

mod ball;
pub mod cache;
mod elementary;
mod precision;
mod root;

pub use ball::{parse_decimal, ApproxReal, Dyadic};
pub use elementary::{ln2, log, log as log_of, AlgebraicConstants};
pub use precision::{PrecisionContext, DEFAULT_MAX_BITS, DEFAULT_WORKING_BITS};
pub use root::{bracket_low, dominant_root, f_k_at_root, psi};

#[allow(unused_imports)]
pub(crate) use elementary::is_below_pow2;
