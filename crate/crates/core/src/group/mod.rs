//! Finite-group machinery shared by every quotient: a context trait, subgroup
//! closures with constant-time membership, intersections, double-coset
//! membership, transversals and the set identities that relate them.

mod contexts;
mod identities;
mod perm;
mod sd;

use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;

use indexmap::IndexSet;

use crate::budget::Budget;
use crate::error::{Error, Result};

pub use contexts::{sl2_order, PermGroup, SlQuotient};
pub use identities::{
    check_cor_identity, check_prop_identity, hi_exclusion_check, HiExclusion, Hypothesis,
};
pub use perm::Perm;
pub use sd::{sd_inv, sd_mul, SdElement};

/// A finite group given by generators, with explicit arithmetic.
pub trait Group: Sync {
    type Elem: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn inv(&self, x: &Self::Elem) -> Self::Elem;
    fn generators(&self) -> Vec<Self::Elem>;
    fn budget(&self) -> &Budget;

    /// Order of the whole group when it is known without enumeration.
    fn order(&self) -> Option<u64> {
        None
    }

    /// The whole group, enumerated by closure of its generators.
    fn enumerate(&self) -> Result<GeneratedSubgroup<Self::Elem>>
    where
        Self: Sized,
    {
        if let Some(n) = self.order() {
            self.budget().check_closure(n as usize)?;
        }
        subgroup_closure(self, &self.generators())
    }

    fn conjugate(&self, g: &Self::Elem, x: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(g, x), &self.inv(g))
    }
}

/// Anything that can answer membership questions for a set of elements.
pub trait Membership<E> {
    fn contains(&self, g: &E) -> bool;
}

/// A subgroup as generators plus its full closure.
///
/// Elements are stored in breadth-first insertion order, so iteration (and
/// everything derived from it, such as transversals) is deterministic.
#[derive(Clone, Debug)]
pub struct GeneratedSubgroup<E: Eq + Hash> {
    generators: Vec<E>,
    elements: IndexSet<E>,
}

impl<E: Clone + Eq + Hash> GeneratedSubgroup<E> {
    pub fn generators(&self) -> &[E] {
        &self.generators
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &E) -> bool {
        self.elements.contains(g)
    }

    pub fn iter(&self) -> indexmap::set::Iter<'_, E> {
        self.elements.iter()
    }

    pub fn elements(&self) -> &IndexSet<E> {
        &self.elements
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_subset_of(&self, other: &impl Membership<E>) -> bool {
        self.elements.iter().all(|g| other.contains(g))
    }

    pub fn same_elements(&self, other: &GeneratedSubgroup<E>) -> bool {
        self.size() == other.size() && self.is_subset_of(other)
    }
}

impl<E: Clone + Eq + Hash> Membership<E> for GeneratedSubgroup<E> {
    fn contains(&self, g: &E) -> bool {
        self.elements.contains(g)
    }
}

impl<E: Eq + Hash> Membership<E> for HashSet<E> {
    fn contains(&self, g: &E) -> bool {
        HashSet::contains(self, g)
    }
}

/// Membership through a predicate, for subgroups too large to enumerate.
pub struct Predicate<F>(pub F);

impl<E, F: Fn(&E) -> bool> Membership<E> for Predicate<F> {
    fn contains(&self, g: &E) -> bool {
        (self.0)(g)
    }
}

/// Breadth-first closure of `gens` under right multiplication by generators.
///
/// Right multiplication by the generators alone suffices: the group is finite,
/// so every inverse is a positive power.
pub fn subgroup_closure<G: Group>(ctx: &G, gens: &[G::Elem]) -> Result<GeneratedSubgroup<G::Elem>> {
    let mut elements = IndexSet::new();
    elements.insert(ctx.identity());
    let generators = gens.to_vec();
    let useful: Vec<_> = {
        let id = ctx.identity();
        let mut seen = HashSet::new();
        gens.iter()
            .filter(|g| **g != id && seen.insert((*g).clone()))
            .cloned()
            .collect()
    };
    grow(ctx, &mut elements, 0, &useful)?;
    Ok(GeneratedSubgroup {
        generators,
        elements,
    })
}

fn grow<G: Group>(
    ctx: &G,
    elements: &mut IndexSet<G::Elem>,
    start: usize,
    gens: &[G::Elem],
) -> Result<()> {
    let budget = ctx.budget();
    let mut cursor = start;
    while cursor < elements.len() {
        let x = elements.get_index(cursor).expect("cursor in range").clone();
        for g in gens {
            let y = ctx.mul(&x, g);
            if elements.insert(y) {
                budget.check_closure(elements.len())?;
            }
        }
        cursor += 1;
    }
    Ok(())
}

/// Add one generator to an existing closure, reusing the elements already found.
pub fn extend_closure<G: Group>(
    ctx: &G,
    sub: &mut GeneratedSubgroup<G::Elem>,
    gen: G::Elem,
) -> Result<()> {
    if sub.contains(&gen) || gen == ctx.identity() {
        sub.generators.push(gen);
        return Ok(());
    }
    sub.generators.push(gen);
    let gens: Vec<_> = sub.generators.clone();
    grow(ctx, &mut sub.elements, 0, &gens)
}

/// Build a subgroup from a set of elements already known to form a subgroup,
/// choosing a small generating set greedily in iteration order.
pub fn subgroup_from_elements<G: Group>(
    ctx: &G,
    elements: impl IntoIterator<Item = G::Elem>,
) -> Result<GeneratedSubgroup<G::Elem>> {
    let all: IndexSet<G::Elem> = elements.into_iter().collect();
    let mut sub = subgroup_closure(ctx, &[])?;
    for g in &all {
        if !sub.contains(g) {
            extend_closure(ctx, &mut sub, g.clone())?;
        }
    }
    if sub.size() != all.len() {
        return Err(Error::Precondition(format!(
            "element set of size {} is not a subgroup (generates {})",
            all.len(),
            sub.size()
        )));
    }
    // keep the caller's order
    Ok(GeneratedSubgroup {
        generators: sub.generators,
        elements: all,
    })
}

/// `U ∩ V`: enumerate the smaller and filter by membership in the larger.
pub fn subgroup_intersection<G: Group>(
    ctx: &G,
    u: &GeneratedSubgroup<G::Elem>,
    v: &GeneratedSubgroup<G::Elem>,
) -> Result<GeneratedSubgroup<G::Elem>> {
    let (small, large) = if u.size() <= v.size() { (u, v) } else { (v, u) };
    let common: Vec<_> = small
        .iter()
        .filter(|g| large.contains(g))
        .cloned()
        .collect();
    subgroup_from_elements(ctx, common)
}

/// `U ∩ S` for a subgroup `S` given only by membership.
pub fn intersect_with<G: Group>(
    ctx: &G,
    u: &GeneratedSubgroup<G::Elem>,
    s: &impl Membership<G::Elem>,
) -> Result<GeneratedSubgroup<G::Elem>> {
    let common: Vec<_> = u.iter().filter(|g| s.contains(g)).cloned().collect();
    subgroup_from_elements(ctx, common)
}

/// Is `g ∈ UV`? Scans the smaller factor with early exit.
pub fn product_member<G: Group>(
    ctx: &G,
    g: &G::Elem,
    u: &GeneratedSubgroup<G::Elem>,
    v: &GeneratedSubgroup<G::Elem>,
) -> bool {
    if u.size() <= v.size() {
        product_member_scan_left(ctx, g, u, v)
    } else {
        product_member_scan_right(ctx, g, u, v)
    }
}

/// Is `g ∈ UV`, scanning `u ∈ U` and testing `u⁻¹g ∈ V`.
pub fn product_member_scan_left<G: Group>(
    ctx: &G,
    g: &G::Elem,
    u: &GeneratedSubgroup<G::Elem>,
    v: &impl Membership<G::Elem>,
) -> bool {
    u.iter().any(|x| v.contains(&ctx.mul(&ctx.inv(x), g)))
}

/// Is `g ∈ UV`, scanning `v ∈ V` and testing `gv⁻¹ ∈ U`.
pub fn product_member_scan_right<G: Group>(
    ctx: &G,
    g: &G::Elem,
    u: &impl Membership<G::Elem>,
    v: &GeneratedSubgroup<G::Elem>,
) -> bool {
    v.iter().any(|y| u.contains(&ctx.mul(g, &ctx.inv(y))))
}

/// The literal set `{xy : x ∈ A, y ∈ B}`.
pub fn set_product<'a, G: Group>(
    ctx: &G,
    a: impl IntoIterator<Item = &'a G::Elem> + Clone,
    b: impl IntoIterator<Item = &'a G::Elem> + Clone,
) -> Result<HashSet<G::Elem>>
where
    G::Elem: 'a,
{
    let na = a.clone().into_iter().count() as u128;
    let nb = b.clone().into_iter().count() as u128;
    ctx.budget().check_product(na * nb)?;
    let mut out = HashSet::new();
    for x in a {
        for y in b.clone() {
            out.insert(ctx.mul(x, y));
        }
    }
    Ok(out)
}

/// Oracle for double cosets: the literal set `UV`.
pub fn brute_force_product<G: Group>(
    ctx: &G,
    u: &GeneratedSubgroup<G::Elem>,
    v: &GeneratedSubgroup<G::Elem>,
) -> Result<HashSet<G::Elem>> {
    set_product(ctx, u.iter(), v.iter())
}

/// A decomposition `H = ⊔ H′hᵢ` with `h₁` the identity.
#[derive(Clone, Debug)]
pub struct CosetDecomposition<E> {
    pub reps: Vec<E>,
    pub subgroup_size: usize,
    pub supergroup_size: usize,
}

impl<E> CosetDecomposition<E> {
    pub fn index(&self) -> usize {
        self.reps.len()
    }
}

/// Right coset representatives of `hp` in `h`, chosen greedily in the
/// enumeration order of `h`.
pub fn coset_reps<G: Group>(
    ctx: &G,
    h: &GeneratedSubgroup<G::Elem>,
    hp: &GeneratedSubgroup<G::Elem>,
) -> Result<CosetDecomposition<G::Elem>> {
    if let Some(g) = hp.generators().iter().find(|g| !h.contains(g)) {
        return Err(Error::Precondition(format!(
            "subgroup generator {g:?} is not in the supergroup"
        )));
    }
    let mut covered: HashSet<G::Elem> = HashSet::with_capacity(h.size());
    let mut reps = Vec::new();
    for x in h.iter() {
        if covered.contains(x) {
            continue;
        }
        for y in hp.iter() {
            covered.insert(ctx.mul(y, x));
        }
        reps.push(x.clone());
    }
    Ok(CosetDecomposition {
        reps,
        subgroup_size: hp.size(),
        supergroup_size: h.size(),
    })
}

/// Normality of `n` in the group generated by `ctx`'s generators, checked on
/// generators: `gxg⁻¹ ∈ N` for every context generator `g` and generator `x` of `N`.
pub fn is_normal_on_generators<G: Group>(ctx: &G, n: &GeneratedSubgroup<G::Elem>) -> bool {
    ctx.generators().iter().all(|g| {
        let gi = ctx.inv(g);
        n.generators()
            .iter()
            .all(|x| n.contains(&ctx.conjugate(g, x)) && n.contains(&ctx.conjugate(&gi, x)))
    })
}

/// Smallest normal subgroup containing `gens`.
pub fn normal_closure<G: Group>(ctx: &G, gens: &[G::Elem]) -> Result<GeneratedSubgroup<G::Elem>> {
    let mut sub = subgroup_closure(ctx, gens)?;
    let cgens = ctx.generators();
    loop {
        let missing = cgens.iter().find_map(|g| {
            sub.generators()
                .iter()
                .map(|x| ctx.conjugate(g, x))
                .find(|c| !sub.contains(c))
        });
        match missing {
            Some(c) => extend_closure(ctx, &mut sub, c)?,
            None => return Ok(sub),
        }
    }
}

/// Closure of the union of two subgroups' generators.
pub fn join<G: Group>(
    ctx: &G,
    u: &GeneratedSubgroup<G::Elem>,
    v: &GeneratedSubgroup<G::Elem>,
) -> Result<GeneratedSubgroup<G::Elem>> {
    let mut gens = u.generators().to_vec();
    gens.extend_from_slice(v.generators());
    subgroup_closure(ctx, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::contexts::{PermGroup, SlQuotient};

    fn sym3() -> PermGroup {
        PermGroup::symmetric(3, Budget::default())
    }

    fn p(v: &[u32]) -> Perm {
        Perm::new(v.to_vec()).unwrap()
    }

    #[test]
    fn empty_generators_give_trivial_subgroup() {
        let ctx = sym3();
        let u = subgroup_closure(&ctx, &[]).unwrap();
        assert_eq!(u.size(), 1);
        assert!(u.contains(&Perm::identity(3)));
    }

    #[test]
    fn sl2_small_orders() {
        let ctx = SlQuotient::new(2, false, Budget::default()).unwrap();
        assert_eq!(ctx.enumerate().unwrap().size(), 6);
        let ctx = SlQuotient::new(5, false, Budget::default()).unwrap();
        assert_eq!(ctx.enumerate().unwrap().size(), 120);
    }

    #[test]
    fn closure_budget_is_reported() {
        let ctx = SlQuotient::new(
            5,
            false,
            Budget {
                closure: 50,
                ..Budget::default()
            },
        )
        .unwrap();
        let err = ctx.enumerate().unwrap_err();
        assert!(err.is_budget(), "{err}");
    }

    #[test]
    fn intersections() {
        let ctx = sym3();
        let all = ctx.enumerate().unwrap();
        let u = subgroup_closure(&ctx, &[p(&[1, 0, 2])]).unwrap();
        let triv = subgroup_closure(&ctx, &[]).unwrap();
        assert!(subgroup_intersection(&ctx, &u, &u)
            .unwrap()
            .same_elements(&u));
        assert!(subgroup_intersection(&ctx, &u, &triv).unwrap().is_trivial());
        assert!(subgroup_intersection(&ctx, &all, &u)
            .unwrap()
            .same_elements(&u));
    }

    #[test]
    fn product_of_two_transposition_subgroups_has_four_elements() {
        let ctx = sym3();
        let u = subgroup_closure(&ctx, &[p(&[1, 0, 2])]).unwrap();
        let v = subgroup_closure(&ctx, &[p(&[0, 2, 1])]).unwrap();
        let uv = brute_force_product(&ctx, &u, &v).unwrap();
        assert_eq!(uv.len(), 4);
        let vu = brute_force_product(&ctx, &v, &u).unwrap();
        // UV is not a subgroup, so UV ≠ VU
        assert_ne!(uv, vu);
        for g in ctx.enumerate().unwrap().iter() {
            assert_eq!(product_member(&ctx, g, &u, &v), uv.contains(g));
        }
    }

    #[test]
    fn product_member_trivial_cases() {
        let ctx = SlQuotient::new(3, false, Budget::default()).unwrap();
        let all = ctx.enumerate().unwrap();
        let triv = subgroup_closure(&ctx, &[]).unwrap();
        let u = subgroup_closure(&ctx, &[ctx.generators()[1]]).unwrap();
        assert!(product_member(&ctx, &ctx.identity(), &u, &triv));
        for g in all.iter() {
            assert_eq!(product_member(&ctx, g, &u, &triv), u.contains(g));
        }
    }

    #[test]
    fn coset_reps_lagrange() {
        let ctx = sym3();
        let all = ctx.enumerate().unwrap();
        let a3 = subgroup_closure(&ctx, &[p(&[1, 2, 0])]).unwrap();
        let d = coset_reps(&ctx, &all, &a3).unwrap();
        assert_eq!(d.index(), 2);
        assert_eq!(d.reps[0], Perm::identity(3));
        let same = coset_reps(&ctx, &all, &all).unwrap();
        assert_eq!(same.reps, vec![Perm::identity(3)]);
        let t = subgroup_closure(&ctx, &[p(&[1, 0, 2])]).unwrap();
        assert!(coset_reps(&ctx, &t, &a3).is_err());
    }

    #[test]
    fn normality() {
        let ctx = sym3();
        let a3 = subgroup_closure(&ctx, &[p(&[1, 2, 0])]).unwrap();
        let t = subgroup_closure(&ctx, &[p(&[1, 0, 2])]).unwrap();
        assert!(is_normal_on_generators(&ctx, &a3));
        assert!(!is_normal_on_generators(&ctx, &t));
        let nc = normal_closure(&ctx, &[p(&[1, 0, 2])]).unwrap();
        assert_eq!(nc.size(), 6);
    }

    #[test]
    fn from_elements_rejects_non_subgroups() {
        let ctx = sym3();
        let r = subgroup_from_elements(&ctx, vec![Perm::identity(3), p(&[1, 2, 0])]);
        assert!(r.is_err());
    }
}
