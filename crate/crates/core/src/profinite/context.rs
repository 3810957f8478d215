//! Finite quotients of `M₂(ℤ) ⋊ SL₂(ℤ)` as group contexts, ambient elements
//! as words, and kernels between quotients.

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{ModMat2, ZMat2};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{
    intersect_with, sl2_order, subgroup_closure, GeneratedSubgroup, Group, Membership, Perm,
    PermGroup, SdElement,
};
use crate::modular::{word_eval, word_eval_mod, ModularWord};

use super::spec::QuotientSpec;

/// An ambient element `(a, word_eval(w))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupWord {
    pub a: ZMat2,
    pub w: ModularWord,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord {
            a: ZMat2::zero(),
            w: ModularWord::empty(),
        }
    }

    /// An element of the additive part.
    pub fn additive(a: ZMat2) -> Self {
        GroupWord {
            a,
            w: ModularWord::empty(),
        }
    }

    /// An element of the linear part.
    pub fn linear(w: ModularWord) -> Self {
        GroupWord {
            a: ZMat2::zero(),
            w,
        }
    }

    pub fn h(&self) -> ZMat2 {
        word_eval(&self.w)
    }

    /// `(a₁ + h₁a₂, w₁w₂)`.
    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        GroupWord {
            a: &self.a + &(&self.h() * &other.a),
            w: self.w.concat(&other.w),
        }
    }

    /// `(-h⁻¹a, w⁻¹)`.
    pub fn inv(&self) -> GroupWord {
        let hi = self
            .h()
            .inverse_unimodular()
            .expect("words evaluate into SL2");
        GroupWord {
            a: -&(&hi * &self.a),
            w: self.w.inverse(),
        }
    }

    /// Random element with additive entries in `[-bound, bound]` and a random
    /// word of `len` letters.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, bound: i64, len: usize) -> GroupWord {
        let mut e = || BigInt::from(rng.gen_range(-bound..=bound));
        let a = ZMat2::new(e(), e(), e(), e());
        GroupWord {
            a,
            w: ModularWord::random(rng, len),
        }
    }
}

/// Text form `a,b,c,d:WORD`, where either side may be omitted: `S T^2` is
/// `(0, ST²)` and `1,0,0,1:` is `(I, 1)`.
impl std::str::FromStr for GroupWord {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (a_text, w_text) = match text.split_once(':') {
            Some((a, w)) => (Some(a), w),
            None => (None, text),
        };
        let a = match a_text.map(str::trim) {
            None | Some("") => ZMat2::zero(),
            Some(a) => {
                let e = a
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<BigInt>()
                            .map_err(|_| Error::Invalid(format!("bad matrix entry {x:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let e: [BigInt; 4] = e
                    .try_into()
                    .map_err(|_| Error::Invalid(format!("expected four entries in {a:?}")))?;
                ZMat2::from_entries(e)
            }
        };
        Ok(GroupWord {
            a,
            w: w_text.parse()?,
        })
    }
}

impl std::fmt::Display for GroupWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b, c, d] = self.a.entries();
        write!(f, "{a},{b},{c},{d}:{}", self.w)
    }
}

/// The quotient described by a [`QuotientSpec`], as a group context.
#[derive(Clone, Debug)]
pub struct SdQuotient {
    spec: QuotientSpec,
    s: SdElement,
    t: SdElement,
    budget: Budget,
}

impl SdQuotient {
    pub fn spec(&self) -> &QuotientSpec {
        &self.spec
    }

    pub fn modulus(&self) -> u64 {
        self.spec.m
    }

    fn degree(&self) -> Option<usize> {
        self.spec.rep.as_ref().map(|r| r.degree())
    }

    /// Image of an ambient element.
    pub fn project(&self, g: &GroupWord) -> Result<SdElement> {
        let m = self.spec.m;
        Ok(SdElement {
            a: g.a.reduce(m)?,
            h: word_eval_mod(&g.w, m)?,
            sigma: self.spec.rep.as_ref().map(|r| r.image(&g.w)),
        })
    }

    pub fn project_all(&self, gs: &[GroupWord]) -> Result<Vec<SdElement>> {
        gs.iter().map(|g| self.project(g)).collect()
    }

    /// `(a, 1)` for a matrix over `ℤ/m`.
    pub fn additive(&self, a: ModMat2) -> SdElement {
        SdElement {
            a,
            h: ModMat2::identity(self.spec.m).expect("valid modulus"),
            sigma: self.degree().map(Perm::identity),
        }
    }
}

/// Build the quotient context, checking the budget and the formation filter.
pub fn quotient_context(spec: &QuotientSpec, budget: &Budget) -> Result<SdQuotient> {
    let m = spec.m;
    if m < 2 {
        return Err(Error::InvalidModulus(m as i128));
    }
    if m > budget.modulus {
        return Err(Error::budget("modulus", budget.modulus));
    }
    let filter = spec.filter.build()?;
    let image_order = match (&spec.rep, spec.filter.kind.as_str()) {
        (Some(rep), kind) if kind != "all" => {
            let group = PermGroup::new(
                rep.degree(),
                vec![rep.perm_s().clone(), rep.perm_t().clone()],
                *budget,
            )?;
            Some(group.enumerate()?.size() as u64)
        }
        _ => None,
    };
    if !filter.admits(m, image_order) {
        return Err(Error::Precondition(format!(
            "quotient {} is not admitted by filter {}",
            spec.label(),
            filter.name()
        )));
    }
    let linear = |w: &str| -> Result<SdElement> {
        let w: ModularWord = w.parse()?;
        Ok(SdElement {
            a: ModMat2::zero(m)?,
            h: word_eval_mod(&w, m)?,
            sigma: spec.rep.as_ref().map(|r| r.image(&w)),
        })
    };
    Ok(SdQuotient {
        s: linear("S")?,
        t: linear("T")?,
        spec: spec.clone(),
        budget: *budget,
    })
}

impl Group for SdQuotient {
    type Elem = SdElement;

    fn identity(&self) -> SdElement {
        SdElement::identity(self.spec.m, self.degree()).expect("valid modulus")
    }

    fn mul(&self, x: &SdElement, y: &SdElement) -> SdElement {
        x.mul_unchecked(y)
    }

    fn inv(&self, x: &SdElement) -> SdElement {
        x.inv_unchecked()
    }

    /// Elementary matrices in the additive part, then `S` and `T`.
    fn generators(&self) -> Vec<SdElement> {
        let m = self.spec.m;
        let mut gens: Vec<SdElement> = (0..4)
            .map(|i| self.additive(ModMat2::elementary(i, m).expect("valid modulus")))
            .collect();
        gens.push(self.s.clone());
        gens.push(self.t.clone());
        gens
    }

    fn budget(&self) -> &Budget {
        &self.budget
    }

    fn order(&self) -> Option<u64> {
        match self.spec.rep {
            None => {
                let m = self.spec.m;
                Some(m.pow(4) * sl2_order(m))
            }
            Some(_) => None,
        }
    }
}

/// Membership in the kernel of the map from a fine quotient onto a coarse one.
#[derive(Clone, Debug)]
pub struct RefinementKernel {
    coarse_m: u64,
    /// Equivariant map from fine points to coarse points, when the coarse
    /// quotient carries a representation.
    point_map: Option<Vec<usize>>,
}

impl RefinementKernel {
    pub fn new(fine: &QuotientSpec, coarse: &QuotientSpec) -> Result<Self> {
        if !fine.refines(coarse) {
            return Err(Error::Precondition(format!(
                "{} does not refine {}",
                fine.label(),
                coarse.label()
            )));
        }
        let point_map = match (&fine.rep, &coarse.rep) {
            (Some(f), Some(c)) => Some(f.map_onto(c).expect("checked by refines")),
            _ => None,
        };
        Ok(RefinementKernel {
            coarse_m: coarse.m,
            point_map,
        })
    }
}

impl Membership<SdElement> for RefinementKernel {
    fn contains(&self, x: &SdElement) -> bool {
        let m = self.coarse_m;
        let a = x.a.reduce_to(m).expect("coarse modulus divides fine");
        let h = x.h.reduce_to(m).expect("coarse modulus divides fine");
        if !a.is_zero() || !h.is_identity() {
            return false;
        }
        match (&self.point_map, &x.sigma) {
            (Some(pi), Some(sigma)) => (0..pi.len()).all(|p| pi[sigma.apply(p)] == pi[p]),
            _ => true,
        }
    }
}

/// The kernel of `fine → coarse` as an explicit subgroup of the fine quotient.
pub fn kernel_of_refinement(
    fine: &SdQuotient,
    coarse: &QuotientSpec,
) -> Result<GeneratedSubgroup<SdElement>> {
    let kernel = RefinementKernel::new(fine.spec(), coarse)?;
    let all = fine.enumerate()?;
    intersect_with(fine, &all, &kernel)
}

/// Closure of the projections of ambient generators.
pub fn image_of(ctx: &SdQuotient, gens: &[GroupWord]) -> Result<GeneratedSubgroup<SdElement>> {
    subgroup_closure(ctx, &ctx.project_all(gens)?)
}
