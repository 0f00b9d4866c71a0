//! Cancellation of a finitely generated summand: from `A ⊕ G = B ⊕ H` with `A ≅ B`, an
//! explicit isomorphism `G → H`.

mod classify;
mod cyclic;
mod hom;
mod peel;

pub use classify::{invariant_factors, not_generating_set, torsion_subgroup, InvariantFactors};
pub use cyclic::{
    align_generator, build_cyclic_iso, cancel_cyclic, cancel_cyclic_traced, find_coset_generator, intersect_d,
    quotient_finite_nontrivial, Branch, CyclicTrace, CANDIDATE_CAP,
};
pub use hom::{hom_eval, is_coefficient, pushforward, CyclicPiece, GroupHom, LinearMap};
pub use peel::{cancel_fg, cancel_fg_traced};

use crate::error::{Error, Result};
use crate::groups::Subgroup;
use crate::verify::{check_between, VerifyMode};

/// Sample bound for self-verification of groups that are not finitely generated.
pub const SELF_CHECK_SAMPLES: usize = 48;

/// Re-checks a produced map; a failure here is a bug, reported as an error.
pub(crate) fn self_check(g: &Subgroup, h: &Subgroup, f: &GroupHom) -> Result<()> {
    let mode = if g.is_finitely_generated() && h.is_finitely_generated() {
        VerifyMode::Exact
    } else {
        VerifyMode::Sampled
    };
    let rep = check_between(g, h, f, mode, SELF_CHECK_SAMPLES)?;
    if rep.passed() {
        Ok(())
    } else {
        Err(Error::VerificationFailed(format!(
            "constructed map fails its own check: {rep:?}"
        )))
    }
}
