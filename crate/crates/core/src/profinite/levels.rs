//! Finite-level conditions evaluated along a tower of quotients: double-coset
//! membership, the tractability inclusion `φ(H) ∩ φ(K) ⊆ φ(H∩K)·φ(M)` and
//! separability probes for `(H ∩ L)K`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{
    brute_force_product, intersect_with, product_member, product_member_scan_left,
    subgroup_closure, subgroup_intersection, GeneratedSubgroup, Group, Predicate, SdElement,
};
use crate::modular::PermRep;
use crate::registry::Registry;

use super::context::{image_of, quotient_context, GroupWord, RefinementKernel, SdQuotient};
use super::spec::QuotientSpec;

/// A test for `g ∈ UV` in a finite quotient.
pub trait DoubleCosetMember: Send + Sync {
    fn name(&self) -> &'static str;
    fn member(
        &self,
        ctx: &SdQuotient,
        g: &SdElement,
        u: &GeneratedSubgroup<SdElement>,
        v: &GeneratedSubgroup<SdElement>,
    ) -> Result<bool>;
}

/// Scan the smaller factor and test membership in the other.
pub struct Scan;

impl DoubleCosetMember for Scan {
    fn name(&self) -> &'static str {
        "scan"
    }

    fn member(
        &self,
        ctx: &SdQuotient,
        g: &SdElement,
        u: &GeneratedSubgroup<SdElement>,
        v: &GeneratedSubgroup<SdElement>,
    ) -> Result<bool> {
        Ok(product_member(ctx, g, u, v))
    }
}

/// Build the whole product set; only for small factors.
pub struct Brute;

impl DoubleCosetMember for Brute {
    fn name(&self) -> &'static str {
        "brute"
    }

    fn member(
        &self,
        ctx: &SdQuotient,
        g: &SdElement,
        u: &GeneratedSubgroup<SdElement>,
        v: &GeneratedSubgroup<SdElement>,
    ) -> Result<bool> {
        Ok(brute_force_product(ctx, u, v)?.contains(g))
    }
}

pub fn dcoset_registry() -> Registry<dyn DoubleCosetMember> {
    let mut r: Registry<dyn DoubleCosetMember> = Registry::new("double-coset method");
    r.register("scan", |_: &Value| Ok(Box::new(Scan)));
    r.register("brute", |_: &Value| Ok(Box::new(Brute)));
    r
}

pub fn dcoset_method(name: &str) -> Result<Box<dyn DoubleCosetMember>> {
    dcoset_registry().build(name, &Value::Null)
}

/// A subgroup `L` of the ambient group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SubgroupSpec {
    /// Generated by the given elements.
    Generated { gens: Vec<GroupWord> },
    /// `M₂(ℤ) ⋊ H′` for the subgroup `H′` of `SL₂(ℤ)` described by `rep`.
    AdditiveBy { rep: PermRep },
}

/// The left factor `H` or `H ∩ L` of a double coset, at one level.
fn left_factor(
    ctx: &SdQuotient,
    h: &GeneratedSubgroup<SdElement>,
    l: Option<&SubgroupSpec>,
) -> Result<GeneratedSubgroup<SdElement>> {
    match l {
        None => Ok(h.clone()),
        Some(SubgroupSpec::Generated { gens }) => {
            let im_l = image_of(ctx, gens)?;
            subgroup_intersection(ctx, h, &im_l)
        }
        Some(SubgroupSpec::AdditiveBy { rep }) => {
            // φ(L) = {(a, p) : p ∈ image of H′}; only the linear part matters
            let linear: Vec<GroupWord> = rep
                .subgroup_generators()
                .into_iter()
                .map(GroupWord::linear)
                .collect();
            let im_hp = image_of(ctx, &linear)?;
            let zero = ctx.identity().a;
            let in_l = Predicate(|x: &SdElement| {
                let mut lin = x.clone();
                lin.a = zero;
                im_hp.contains(&lin)
            });
            intersect_with(ctx, h, &in_l)
        }
    }
}

/// A double coset `(H ∩ L)K` of the ambient group, by generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCosetTarget {
    pub name: String,
    pub h: Vec<GroupWord>,
    pub k: Vec<GroupWord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<SubgroupSpec>,
}

/// Membership of `φ(g)` in the image of a double coset at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelMembership {
    pub spec: QuotientSpec,
    pub member: bool,
    pub left_size: u64,
    pub right_size: u64,
    pub method: String,
}

pub fn member_at(
    target: &DoubleCosetTarget,
    g: &GroupWord,
    spec: &QuotientSpec,
    method: &dyn DoubleCosetMember,
    budget: &Budget,
) -> Result<LevelMembership> {
    let ctx = quotient_context(spec, budget)?;
    let im_h = image_of(&ctx, &target.h)?;
    let left = left_factor(&ctx, &im_h, target.l.as_ref())?;
    let right = image_of(&ctx, &target.k)?;
    let member = method.member(&ctx, &ctx.project(g)?, &left, &right)?;
    Ok(LevelMembership {
        spec: spec.clone(),
        member,
        left_size: left.size() as u64,
        right_size: right.size() as u64,
        method: method.name().to_string(),
    })
}

/// Evaluate `member_at` at every level in parallel, in tower order.
pub fn members_along(
    target: &DoubleCosetTarget,
    g: &GroupWord,
    tower: &[QuotientSpec],
    method: &dyn DoubleCosetMember,
    budget: &Budget,
) -> Result<Vec<LevelMembership>> {
    tower
        .par_iter()
        .map(|spec| member_at(target, g, spec, method, budget))
        .collect()
}

/// A finite quotient in which `g` falls outside the image of a double coset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparabilityCertificate {
    pub g: GroupWord,
    pub target: DoubleCosetTarget,
    pub level: LevelMembership,
}

impl SeparabilityCertificate {
    /// Recompute the membership at the certified level.
    pub fn replay(&self, budget: &Budget) -> Result<()> {
        let method = dcoset_method(&self.level.method)?;
        let again = member_at(
            &self.target,
            &self.g,
            &self.level.spec,
            method.as_ref(),
            budget,
        )?;
        if again != self.level || again.member {
            return Err(Error::Precondition(format!(
                "certificate at {} does not replay",
                self.level.spec.label()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ProbeOutcome {
    Certified(SeparabilityCertificate),
    /// No level of the tower excludes `g`; this decides nothing.
    Inconclusive {
        levels: Vec<LevelMembership>,
    },
}

/// Look for a level of `tower` whose image of `(H ∩ L)K` excludes `g`.
///
/// At every level the caller's assertion `H ∩ K ⊆ L` is spot-checked as
/// `φ(H) ∩ φ(K) ⊆ φ(L)`.
pub fn thm_b_probe(
    h: &[GroupWord],
    k: &[GroupWord],
    l: &SubgroupSpec,
    g: &GroupWord,
    tower: &[QuotientSpec],
    method: &dyn DoubleCosetMember,
    budget: &Budget,
) -> Result<ProbeOutcome> {
    if tower.is_empty() {
        return Err(Error::Invalid("tower is empty".into()));
    }
    let target = DoubleCosetTarget {
        name: "(H∩L)K".into(),
        h: h.to_vec(),
        k: k.to_vec(),
        l: Some(l.clone()),
    };
    let levels: Vec<LevelMembership> = tower
        .par_iter()
        .map(|spec| {
            spot_check_containment(h, k, l, spec, budget)?;
            member_at(&target, g, spec, method, budget)
        })
        .collect::<Result<_>>()?;
    match levels.iter().find(|lv| !lv.member) {
        Some(level) => Ok(ProbeOutcome::Certified(SeparabilityCertificate {
            g: g.clone(),
            target,
            level: level.clone(),
        })),
        None => Ok(ProbeOutcome::Inconclusive { levels }),
    }
}

fn spot_check_containment(
    h: &[GroupWord],
    k: &[GroupWord],
    l: &SubgroupSpec,
    spec: &QuotientSpec,
    budget: &Budget,
) -> Result<()> {
    let ctx = quotient_context(spec, budget)?;
    let im_h = image_of(&ctx, h)?;
    let im_k = image_of(&ctx, k)?;
    let cap = subgroup_intersection(&ctx, &im_h, &im_k)?;
    let cap_l = left_factor(&ctx, &cap, Some(l))?;
    if cap_l.size() != cap.size() {
        return Err(Error::Precondition(format!(
            "φ(H) ∩ φ(K) is not inside φ(L) at {}",
            spec.label()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum CandidateOutcome {
    Success {
        intersection_size: u64,
        cap_image_size: u64,
    },
    Violated {
        intersection_size: u64,
        cap_image_size: u64,
        violations: u64,
        /// The first few elements of `φ(H) ∩ φ(K)` outside `φ(H∩K)·φ(M)`.
        examples: Vec<SdElement>,
    },
    Rejected {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateResult {
    pub spec: QuotientSpec,
    #[serde(flatten)]
    pub outcome: CandidateOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TractabilityReport {
    pub m_spec: QuotientSpec,
    pub candidates: Vec<CandidateResult>,
    pub found_n: Option<QuotientSpec>,
}

const VIOLATION_EXAMPLES: usize = 4;

fn evaluate_candidate(
    h: &[GroupWord],
    k: &[GroupWord],
    cap: &[GroupWord],
    m_spec: &QuotientSpec,
    n: &QuotientSpec,
    budget: &Budget,
) -> Result<CandidateOutcome> {
    let kernel = match RefinementKernel::new(n, m_spec) {
        Ok(kernel) => kernel,
        Err(e) => {
            return Ok(CandidateOutcome::Rejected {
                reason: e.to_string(),
            })
        }
    };
    let ctx = match quotient_context(n, budget) {
        Ok(ctx) => ctx,
        Err(e) if e.is_budget() => return Err(e),
        Err(e) => {
            return Ok(CandidateOutcome::Rejected {
                reason: e.to_string(),
            })
        }
    };
    let im_h = image_of(&ctx, h)?;
    let im_k = image_of(&ctx, k)?;
    let im_cap = image_of(&ctx, cap)?;
    if !im_cap
        .generators()
        .iter()
        .all(|x| im_h.contains(x) && im_k.contains(x))
    {
        return Ok(CandidateOutcome::Rejected {
            reason: format!("H∩K generators are not in both images at {}", n.label()),
        });
    }
    let u = subgroup_intersection(&ctx, &im_h, &im_k)?;
    let mut violations = 0u64;
    let mut examples = Vec::new();
    for x in u.iter() {
        if !product_member_scan_left(&ctx, x, &im_cap, &kernel) {
            violations += 1;
            if examples.len() < VIOLATION_EXAMPLES {
                examples.push(x.clone());
            }
        }
    }
    let intersection_size = u.size() as u64;
    let cap_image_size = im_cap.size() as u64;
    Ok(if violations == 0 {
        CandidateOutcome::Success {
            intersection_size,
            cap_image_size,
        }
    } else {
        CandidateOutcome::Violated {
            intersection_size,
            cap_image_size,
            violations,
            examples,
        }
    })
}

/// Try candidates `N` in order until `φ(H) ∩ φ(K) ⊆ φ(H∩K)·ker(N → M)`
/// holds. Candidates that do not refine `M` or violate a precondition are
/// recorded as rejected; only budget exhaustion aborts.
pub fn tractable_at(
    h: &[GroupWord],
    k: &[GroupWord],
    cap: &[GroupWord],
    m_spec: &QuotientSpec,
    candidates: &[QuotientSpec],
    budget: &Budget,
) -> Result<TractabilityReport> {
    let mut results = Vec::new();
    let mut found_n = None;
    for n in candidates {
        let outcome = evaluate_candidate(h, k, cap, m_spec, n, budget)?;
        let success = matches!(outcome, CandidateOutcome::Success { .. });
        results.push(CandidateResult {
            spec: n.clone(),
            outcome,
        });
        if success {
            found_n = Some(n.clone());
            break;
        }
    }
    Ok(TractabilityReport {
        m_spec: m_spec.clone(),
        candidates: results,
        found_n,
    })
}

/// Re-evaluate the successful candidate of a report from the generators.
pub fn verify_tractability(
    report: &TractabilityReport,
    h: &[GroupWord],
    k: &[GroupWord],
    cap: &[GroupWord],
    budget: &Budget,
) -> Result<bool> {
    match &report.found_n {
        None => Ok(true),
        Some(n) => Ok(matches!(
            evaluate_candidate(h, k, cap, &report.m_spec, n, budget)?,
            CandidateOutcome::Success { .. }
        )),
    }
}

/// Closure of projected generators at one level, exposed for callers that
/// build their own checks.
pub fn level_image(
    spec: &QuotientSpec,
    gens: &[GroupWord],
    budget: &Budget,
) -> Result<(SdQuotient, GeneratedSubgroup<SdElement>)> {
    let ctx = quotient_context(spec, budget)?;
    let gens = ctx.project_all(gens)?;
    let image = subgroup_closure(&ctx, &gens)?;
    Ok((ctx, image))
}
