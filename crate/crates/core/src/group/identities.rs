//! Set identities relating double cosets of nested subgroups.
//!
//! Each checker verifies its hypotheses first and reports the first one that
//! fails as [`Error::Hypothesis`]; only then is the identity itself evaluated
//! by explicit set construction.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

use super::{
    coset_reps, intersect_with, is_normal_on_generators, join, product_member_scan_left,
    set_product, subgroup_intersection, GeneratedSubgroup, Group,
};

/// A named hypothesis of one of the identity checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// `N` is normal in the ambient group.
    NNormal,
    /// `H′ ⊆ H`.
    HpInH,
    /// `K′ ⊆ K`.
    KpInK,
    /// `H ∩ K ⊆ H′`.
    HcapKInHp,
    /// `H ∩ K ⊆ K′`.
    HcapKInKp,
    /// `H ∩ NK ⊆ H′`.
    HcapNKInHp,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Hypothesis::NNormal => "N is normal",
            Hypothesis::HpInH => "H' ⊆ H",
            Hypothesis::KpInK => "K' ⊆ K",
            Hypothesis::HcapKInHp => "H ∩ K ⊆ H'",
            Hypothesis::HcapKInKp => "H ∩ K ⊆ K'",
            Hypothesis::HcapNKInHp => "H ∩ NK ⊆ H'",
        };
        f.write_str(s)
    }
}

fn require(ok: bool, h: Hypothesis) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(h))
    }
}

/// Decides `H′K = HK ∩ H′KN`.
pub fn check_prop_identity<G: Group>(
    ctx: &G,
    h: &GeneratedSubgroup<G::Elem>,
    k: &GeneratedSubgroup<G::Elem>,
    hp: &GeneratedSubgroup<G::Elem>,
    n: &GeneratedSubgroup<G::Elem>,
) -> Result<bool> {
    require(is_normal_on_generators(ctx, n), Hypothesis::NNormal)?;
    require(hp.is_subset_of(h), Hypothesis::HpInH)?;
    let hk_cap = subgroup_intersection(ctx, h, k)?;
    require(hk_cap.is_subset_of(hp), Hypothesis::HcapKInHp)?;
    // NK is a subgroup because N is normal.
    let nk = join(ctx, n, k)?;
    let h_cap_nk = intersect_with(ctx, h, &nk)?;
    require(h_cap_nk.is_subset_of(hp), Hypothesis::HcapNKInHp)?;

    let hpk = set_product(ctx, hp.iter(), k.iter())?;
    let hk = set_product(ctx, h.iter(), k.iter())?;
    let hpkn = set_product(ctx, hpk.iter(), n.iter())?;
    let rhs: HashSet<_> = hk.intersection(&hpkn).cloned().collect();
    Ok(hpk == rhs)
}

/// Decides `H′K ∩ HK′ = H′K′`.
pub fn check_cor_identity<G: Group>(
    ctx: &G,
    h: &GeneratedSubgroup<G::Elem>,
    k: &GeneratedSubgroup<G::Elem>,
    hp: &GeneratedSubgroup<G::Elem>,
    kp: &GeneratedSubgroup<G::Elem>,
) -> Result<bool> {
    require(hp.is_subset_of(h), Hypothesis::HpInH)?;
    require(kp.is_subset_of(k), Hypothesis::KpInK)?;
    check_cor_identity_unchecked_cap(ctx, h, k, hp, kp)
}

/// `H′K ∩ HK′ = H′K′` with only the containments `H′ ⊆ H`, `K′ ⊆ K`
/// assumed; the intersection hypotheses are still checked.
fn check_cor_identity_unchecked_cap<G: Group>(
    ctx: &G,
    h: &GeneratedSubgroup<G::Elem>,
    k: &GeneratedSubgroup<G::Elem>,
    hp: &GeneratedSubgroup<G::Elem>,
    kp: &GeneratedSubgroup<G::Elem>,
) -> Result<bool> {
    let cap = subgroup_intersection(ctx, h, k)?;
    require(cap.is_subset_of(hp), Hypothesis::HcapKInHp)?;
    require(cap.is_subset_of(kp), Hypothesis::HcapKInKp)?;
    cor_identity_holds(ctx, h, k, hp, kp)
}

/// Evaluate `H′K ∩ HK′ = H′K′` without checking any hypothesis.
pub fn cor_identity_holds<G: Group>(
    ctx: &G,
    h: &GeneratedSubgroup<G::Elem>,
    k: &GeneratedSubgroup<G::Elem>,
    hp: &GeneratedSubgroup<G::Elem>,
    kp: &GeneratedSubgroup<G::Elem>,
) -> Result<bool> {
    let hpk = set_product(ctx, hp.iter(), k.iter())?;
    let hkp = set_product(ctx, h.iter(), kp.iter())?;
    let hpkp = set_product(ctx, hp.iter(), kp.iter())?;
    let lhs: HashSet<_> = hpk.intersection(&hkp).cloned().collect();
    Ok(lhs == hpkp)
}

/// Outcome of [`hi_exclusion_check`].
#[derive(Clone, Debug)]
pub struct HiExclusion<E> {
    pub holds: bool,
    /// Index and value of the first transversal element lying in `H′KN`.
    pub offending: Option<(usize, E)>,
    pub index: usize,
}

/// Whether every non-identity representative `hᵢ` of `H′` in `H` avoids `H′KN`.
///
/// Requires `N` normal and `H ∩ K ⊆ H′ ⊆ H`; the condition is equivalent to
/// `H ∩ KN ⊆ H′`.
pub fn hi_exclusion_check<G: Group>(
    ctx: &G,
    h: &GeneratedSubgroup<G::Elem>,
    k: &GeneratedSubgroup<G::Elem>,
    hp: &GeneratedSubgroup<G::Elem>,
    n: &GeneratedSubgroup<G::Elem>,
) -> Result<HiExclusion<G::Elem>> {
    require(is_normal_on_generators(ctx, n), Hypothesis::NNormal)?;
    require(hp.is_subset_of(h), Hypothesis::HpInH)?;
    let cap = subgroup_intersection(ctx, h, k)?;
    require(cap.is_subset_of(hp), Hypothesis::HcapKInHp)?;

    let kn = join(ctx, k, n)?;
    let decomposition = coset_reps(ctx, h, hp)?;
    let offending = decomposition
        .reps
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, hi)| product_member_scan_left(ctx, hi, hp, &kn))
        .map(|(i, hi)| (i, hi.clone()));
    Ok(HiExclusion {
        holds: offending.is_none(),
        offending,
        index: decomposition.index(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::group::{subgroup_closure, Perm, PermGroup};

    fn p(v: &[u32]) -> Perm {
        Perm::new(v.to_vec()).unwrap()
    }

    #[test]
    fn prop_identity_trivial_case() {
        let ctx = PermGroup::symmetric(4, Budget::default());
        let h = subgroup_closure(&ctx, &[p(&[1, 2, 3, 0])]).unwrap();
        let k = subgroup_closure(&ctx, &[p(&[1, 0, 2, 3])]).unwrap();
        let triv = subgroup_closure(&ctx, &[]).unwrap();
        assert!(check_prop_identity(&ctx, &h, &k, &h, &triv).unwrap());
        assert!(check_cor_identity(&ctx, &h, &k, &h, &k).unwrap());
    }

    #[test]
    fn violated_hypothesis_is_named() {
        let ctx = PermGroup::symmetric(3, Budget::default());
        let all = ctx.enumerate().unwrap();
        let t = subgroup_closure(&ctx, &[p(&[1, 0, 2])]).unwrap();
        let triv = subgroup_closure(&ctx, &[]).unwrap();
        // H = S3, K = ⟨(01)⟩, H′ = 1: H ∩ K ⊄ H′
        let err = check_prop_identity(&ctx, &all, &t, &triv, &triv).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(Hypothesis::HcapKInHp)));
        // non-normal N
        let err = check_prop_identity(&ctx, &all, &triv, &all, &t).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(Hypothesis::NNormal)));
        // H′ not inside H
        let err = check_cor_identity(&ctx, &t, &t, &all, &t).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(Hypothesis::HpInH)));
    }

    #[test]
    fn dropping_the_nk_hypothesis_is_reported() {
        // H = S3, K = 1, H′ = A3, N = S3: H ∩ NK = S3 ⊄ A3
        let ctx = PermGroup::symmetric(3, Budget::default());
        let all = ctx.enumerate().unwrap();
        let a3 = subgroup_closure(&ctx, &[p(&[1, 2, 0])]).unwrap();
        let triv = subgroup_closure(&ctx, &[]).unwrap();
        let all_n = subgroup_closure(&ctx, &ctx.generators()).unwrap();
        let err = check_prop_identity(&ctx, &all, &triv, &a3, &all_n).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(Hypothesis::HcapNKInHp)));
        let hx = hi_exclusion_check(&ctx, &all, &triv, &a3, &all_n).unwrap();
        assert!(!hx.holds);
        assert_eq!(hx.offending.as_ref().map(|o| o.0), Some(1));
    }

    #[test]
    fn hi_exclusion_vacuous_when_equal() {
        let ctx = PermGroup::symmetric(3, Budget::default());
        let all = ctx.enumerate().unwrap();
        let triv = subgroup_closure(&ctx, &[]).unwrap();
        let hx = hi_exclusion_check(&ctx, &all, &triv, &all, &triv).unwrap();
        assert!(hx.holds);
        assert_eq!(hx.index, 1);
    }
}
