//! Continued fractions, the two reduction lemmas and the campaigns built on them.

pub mod campaign;
pub mod cf;
pub mod dujella;
pub mod legendre;

pub use cf::{cf_expand, cf_rational, CfStop, ContinuedFraction, Refinable};
pub use dujella::{
    dujella_petho_reduce, reduce_with_fallback, OutcomeRecord, ReductionInstance, ReductionMethod,
    ReductionOutcome, ReductionPlan, ReductionStatus, Shift, EXTRA_CONVERGENTS,
};
pub use legendre::{legendre_bound, LegendreBound};
