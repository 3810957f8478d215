//! Quotient towers of `M₂(ℤ) ⋊ SL₂(ℤ)`. Open normal subgroups are handled
//! extensionally, as kernels of explicit finite quotients; every negative
//! search result is "inconclusive", never a decision.

mod context;
mod levels;
mod spec;

pub use crate::group::hi_exclusion_check;
pub use context::{
    image_of, kernel_of_refinement, quotient_context, GroupWord, RefinementKernel, SdQuotient,
};
pub use levels::*;
pub use spec::{
    default_tower, filter_registry, load_tower, AllFinite, FilterSpec, FormationFilter, ProP,
    QuotientSpec,
};

/// Image of an ambient element in the quotient described by `spec`.
pub fn project(
    g: &GroupWord,
    spec: &QuotientSpec,
    budget: &crate::Budget,
) -> crate::Result<crate::group::SdElement> {
    quotient_context(spec, budget)?.project(g)
}
