//! The group `G = M₂(ℤ) ⋊ SL₂(ℤ)` with `H = SL₂(ℤ)` and `K = iHi⁻¹`, where
//! `i = (I, 1)`.
//!
//! `K` consists of the elements `(I − u, u)`, so `H ∩ K = {1}`. Writing
//! `(a, y) = h·k` shows `(a, y) ∈ H′K` exactly when `a + y ∈ H′`; with
//! `H′ = H` this is `det(a + y) = 1`, which every finite quotient can see.
//! For a non-congruence `H′` and `x ∈ Γ(L) \ H′`, the element `(x − I, 1)`
//! lies outside `H′K` yet inside its image in every congruence quotient.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{Decimal, ZMat2};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{
    product_member, subgroup_from_elements, subgroup_intersection, GeneratedSubgroup, Group,
    SdElement,
};
use crate::modular::{
    congruence_gap_witness, coverage_level, image_mod, is_congruence, low_index_reps,
    reduced_member, verify_gap_witness, ModularWord, PermRep, WitnessOutcome, WitnessSearch,
};
use crate::profinite::{
    image_of, member_at, quotient_context, DoubleCosetMember, DoubleCosetTarget, GroupWord,
    LevelMembership, QuotientSpec, Scan, SdQuotient, SeparabilityCertificate, SubgroupSpec,
};

/// `(0, S)` and `(0, T)`.
pub fn h_generators() -> Vec<GroupWord> {
    vec![
        GroupWord::linear(ModularWord::s()),
        GroupWord::linear(ModularWord::t()),
    ]
}

/// `i = (I, 1)`.
pub fn i_element() -> GroupWord {
    GroupWord::additive(ZMat2::identity())
}

/// `i·(0, S)·i⁻¹` and `i·(0, T)·i⁻¹`.
pub fn k_generators() -> Vec<GroupWord> {
    let i = i_element();
    let ii = i.inv();
    h_generators().iter().map(|x| i.mul(x).mul(&ii)).collect()
}

pub fn hk_target() -> DoubleCosetTarget {
    DoubleCosetTarget {
        name: "HK".into(),
        h: h_generators(),
        k: k_generators(),
        l: None,
    }
}

/// `H′K` for `H′` given by a representation; `H′` enters as `H ∩ (A ⋊ H′)`.
pub fn hpk_target(rep: &PermRep) -> DoubleCosetTarget {
    DoubleCosetTarget {
        name: "H'K".into(),
        h: h_generators(),
        k: k_generators(),
        l: Some(SubgroupSpec::AdditiveBy { rep: rep.clone() }),
    }
}

pub struct GsInstance {
    pub spec: QuotientSpec,
    pub ctx: SdQuotient,
    pub im_h: GeneratedSubgroup<SdElement>,
    pub im_k: GeneratedSubgroup<SdElement>,
    pub i_elt: SdElement,
}

pub fn gs_build(spec: &QuotientSpec, budget: &Budget) -> Result<GsInstance> {
    let ctx = quotient_context(spec, budget)?;
    let im_h = image_of(&ctx, &h_generators())?;
    let i_elt = ctx.project(&i_element())?;
    let conjugates: Vec<SdElement> = im_h.iter().map(|u| ctx.conjugate(&i_elt, u)).collect();
    let im_k = subgroup_from_elements(&ctx, conjugates)?;
    Ok(GsInstance {
        spec: spec.clone(),
        ctx,
        im_h,
        im_k,
        i_elt,
    })
}

pub fn gs_intersection(inst: &GsInstance) -> Result<GeneratedSubgroup<SdElement>> {
    subgroup_intersection(&inst.ctx, &inst.im_h, &inst.im_k)
}

/// The determinant criterion at a finite level: `(a, y) ∈ φ(H)φ(K)` iff
/// `det(a + y) ≡ 1`.
pub fn hk_member_projected(x: &SdElement) -> bool {
    x.a.add_same(&x.h).det().is_one()
}

pub fn gs_hk_member(g: &GroupWord, m: u64, budget: &Budget) -> Result<bool> {
    if m < 2 {
        return Err(Error::InvalidModulus(m as i128));
    }
    let ctx = quotient_context(&QuotientSpec::congruence(m), budget)?;
    Ok(hk_member_projected(&ctx.project(g)?))
}

/// The determinant criterion cross-checked against an explicit double-coset
/// scan; disagreement is an error.
pub fn gs_hk_member_checked(g: &GroupWord, m: u64, budget: &Budget) -> Result<bool> {
    let inst = gs_build(&QuotientSpec::congruence(m), budget)?;
    let x = inst.ctx.project(g)?;
    let by_det = hk_member_projected(&x);
    let by_scan = product_member(&inst.ctx, &x, &inst.im_h, &inst.im_k);
    if by_det != by_scan {
        return Err(Error::Precondition(format!(
            "determinant criterion and double-coset scan disagree at m = {m}"
        )));
    }
    Ok(by_det)
}

/// `det(a + y)` for `g = (a, y)`: the determinant of the additive part of `g·i`.
pub fn hk_determinant(g: &GroupWord) -> BigInt {
    (&g.a + &g.h()).det()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum HkWitness {
    Certified {
        determinant: Decimal,
        certificate: SeparabilityCertificate,
    },
    /// `det = 1`: `g` lies in `HK` itself.
    Inconclusive { determinant: Decimal },
}

/// Separate `g` from `HK` at the smallest modulus not dividing `det − 1`.
pub fn gs_hk_witness(g: &GroupWord, budget: &Budget) -> Result<HkWitness> {
    let d = hk_determinant(g);
    let determinant = Decimal(d.clone());
    let dm1 = &d - BigInt::one();
    if dm1.is_zero() {
        return Ok(HkWitness::Inconclusive { determinant });
    }
    let m = (2u64..)
        .find(|&m| !(&dm1 % BigInt::from(m)).is_zero())
        .expect("some modulus does not divide a nonzero integer");
    let level = member_at(&hk_target(), g, &QuotientSpec::congruence(m), &Scan, budget)?;
    if level.member {
        return Err(Error::Precondition(format!(
            "determinant {d} is not 1 mod {m} but the double-coset scan finds g"
        )));
    }
    Ok(HkWitness::Certified {
        determinant,
        certificate: SeparabilityCertificate {
            g: g.clone(),
            target: hk_target(),
            level,
        },
    })
}

/// One level of non-separability evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceLevel {
    pub membership: LevelMembership,
    /// `x mod m` lies in the image of `H′`, the additive-side form of the
    /// same membership.
    pub additive_member: bool,
}

pub const IMPLICATION: &str = "HK is separable by the determinant criterion, while H'K \
     meets the image of g in every congruence quotient tested although g is not in H'K; \
     if H'K is not separable then H ∩ K is not tractable and G fails the \
     Wilson–Zalesskii property. This implication is cited, not computed.";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonSepEvidence {
    pub rep: PermRep,
    pub rep_level: u64,
    pub m_max: u64,
    pub witness: WitnessOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<GroupWord>,
    /// Whether `g ∈ H′K` in the ambient group (decided exactly).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient_member: Option<bool>,
    /// Congruence quotients `m = 2, …, m_max`, none carrying the representation.
    pub levels: Vec<EvidenceLevel>,
    pub implication: String,
}

impl NonSepEvidence {
    /// `g` is outside `H′K` but inside its image at every listed level.
    pub fn is_coherent(&self) -> bool {
        self.ambient_member == Some(false)
            && !self.levels.is_empty()
            && self
                .levels
                .iter()
                .all(|l| l.membership.member && l.additive_member)
    }
}

/// Build the evidence around a given witness outcome. Deterministic, so a
/// recorded witness reproduces the evidence exactly.
pub fn assemble_evidence(
    rep: &PermRep,
    witness: WitnessOutcome,
    m_max: u64,
    method: &dyn DoubleCosetMember,
    budget: &Budget,
) -> Result<NonSepEvidence> {
    let mut evidence = NonSepEvidence {
        rep: rep.clone(),
        rep_level: rep.level(),
        m_max,
        witness: witness.clone(),
        g: None,
        ambient_member: None,
        levels: Vec::new(),
        implication: IMPLICATION.to_string(),
    };
    let WitnessOutcome::Found(w) = witness else {
        return Ok(evidence);
    };
    verify_gap_witness(rep, &w, budget)?;
    let x = w.matrix.clone();
    let g = GroupWord::additive(&x - &ZMat2::identity());
    // (x − I, 1) ∈ H′K ⇔ x ∈ H′
    let ambient_member = rep.contains_matrix(&x)?;
    let target = hpk_target(rep);
    let levels = (2..=m_max)
        .into_par_iter()
        .map(|m| {
            let spec = QuotientSpec::congruence(m);
            let membership = member_at(&target, &g, &spec, method, budget)?;
            let additive_member = reduced_member(rep, &x, m, budget)?;
            Ok(EvidenceLevel {
                membership,
                additive_member,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    evidence.g = Some(g);
    evidence.ambient_member = Some(ambient_member);
    evidence.levels = levels;
    Ok(evidence)
}

/// Search for a congruence-gap witness of `rep` and assemble the evidence
/// that `H′K` is not separated by congruence quotients up to `m_max`.
pub fn gs_wz_failure(
    rep: &PermRep,
    m_max: u64,
    searches: &[Box<dyn WitnessSearch>],
    budget: &Budget,
) -> Result<NonSepEvidence> {
    let verdict = is_congruence(rep, budget)?;
    if verdict.congruence {
        return Err(Error::Precondition(format!(
            "representation of degree {} is congruence (level {})",
            verdict.degree, verdict.level
        )));
    }
    let level = coverage_level(verdict.level, m_max);
    let witness = congruence_gap_witness(rep, level, m_max, searches, budget)?;
    assemble_evidence(rep, witness, m_max, &Scan, budget)
}

/// Re-derive evidence from its recorded witness and compare.
pub fn verify_evidence(evidence: &NonSepEvidence, budget: &Budget) -> Result<()> {
    let again = assemble_evidence(
        &evidence.rep,
        evidence.witness.clone(),
        evidence.m_max,
        &Scan,
        budget,
    )?;
    if &again != evidence {
        return Err(Error::Precondition("evidence does not replay".into()));
    }
    Ok(())
}

/// The orbit of `I` under left multiplication by the image of `H′` in
/// `SL₂(ℤ/m)`, compared with that image as a set of matrices.
pub fn orbit_matches_image(rep: &PermRep, m: u64, budget: &Budget) -> Result<bool> {
    let (_, image) = image_mod(rep, m, false, budget)?;
    let identity = crate::arith::ModMat2::identity(m)?;
    let orbit: std::collections::HashSet<_> = image.iter().map(|h| h.mul_same(&identity)).collect();
    Ok(orbit.len() == image.size() && image.iter().all(|h| orbit.contains(h)))
}

/// The first non-congruence subgroup in canonical order, searching indices
/// up to `max_degree`.
pub fn minimal_noncongruence_rep(max_degree: usize, budget: &Budget) -> Result<Option<PermRep>> {
    for rep in low_index_reps(max_degree, budget)? {
        if !is_congruence(&rep, budget)?.congruence {
            return Ok(Some(rep));
        }
    }
    Ok(None)
}

/// A random ambient element whose determinant criterion fails, i.e. `g ∉ HK`.
pub fn random_outside_hk<R: Rng + ?Sized>(rng: &mut R, bound: i64, len: usize) -> GroupWord {
    loop {
        let g = GroupWord::random(rng, bound, len);
        if !hk_determinant(&g).is_one() {
            return g;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionRow {
    pub m: u64,
    pub h_size: u64,
    pub k_size: u64,
    pub intersection_size: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsDemo {
    pub intersections: Vec<IntersectionRow>,
    pub hk_certificates: Vec<HkWitness>,
    pub evidence: Option<NonSepEvidence>,
}

pub const DEMO_SAMPLES: usize = 5;

/// Intersection table over the default tower up to `max_level`, `HK`
/// certificates for seeded random elements, and `H′K` evidence for the
/// minimal non-congruence subgroup of index at most 7.
pub fn gs_demo(
    max_level: u64,
    seed: u64,
    searches: &[Box<dyn WitnessSearch>],
    budget: &Budget,
) -> Result<GsDemo> {
    let tower: Vec<QuotientSpec> = crate::profinite::default_tower()
        .into_iter()
        .filter(|s| s.m <= max_level)
        .collect();
    let intersections = tower
        .par_iter()
        .map(|spec| {
            let inst = gs_build(spec, budget)?;
            let cap = gs_intersection(&inst)?;
            Ok(IntersectionRow {
                m: spec.m,
                h_size: inst.im_h.size() as u64,
                k_size: inst.im_k.size() as u64,
                intersection_size: cap.size() as u64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hk_certificates = (0..DEMO_SAMPLES)
        .map(|_| gs_hk_witness(&random_outside_hk(&mut rng, 9, 8), budget))
        .collect::<Result<Vec<_>>>()?;
    let evidence = match minimal_noncongruence_rep(7, budget)? {
        Some(rep) => Some(gs_wz_failure(&rep, max_level, searches, budget)?),
        None => None,
    };
    Ok(GsDemo {
        intersections,
        hk_certificates,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::brute_force_product;
    use crate::modular::{searches_by_name, DEFAULT_SEARCHES};

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn build_at_two() {
        let inst = gs_build(&QuotientSpec::congruence(2), &b()).unwrap();
        assert_eq!(inst.im_h.size(), 6);
        assert_eq!(inst.im_k.size(), 6);
        // i² = (2I, 1), which is trivial mod 2
        assert!(inst.ctx.mul(&inst.i_elt, &inst.i_elt).is_identity());
    }

    #[test]
    fn k_has_the_conjugation_form() {
        for m in [2, 3] {
            let inst = gs_build(&QuotientSpec::congruence(m), &b()).unwrap();
            let identity = crate::arith::ModMat2::identity(m).unwrap();
            for u in inst.im_k.iter() {
                assert_eq!(u.a, identity.sub(&u.h).unwrap());
            }
            // closure of conjugated generators gives the same set
            let by_gens = image_of(&inst.ctx, &k_generators()).unwrap();
            assert!(by_gens.same_elements(&inst.im_k));
        }
    }

    #[test]
    fn trivial_intersection() {
        for m in 2..=4 {
            let inst = gs_build(&QuotientSpec::congruence(m), &b()).unwrap();
            assert_eq!(gs_intersection(&inst).unwrap().size(), 1);
        }
    }

    #[test]
    fn determinant_criterion_examples() {
        assert!(gs_hk_member_checked(&GroupWord::identity(), 2, &b()).unwrap());
        // g = i: det(I + I) = 4
        let i = i_element();
        assert!(gs_hk_member_checked(&i, 3, &b()).unwrap());
        assert!(!gs_hk_member_checked(&i, 2, &b()).unwrap());
        // a + y unimodular: member everywhere
        let g = GroupWord {
            a: ZMat2::new(1, 0, 1, 0),
            w: ModularWord::t(),
        };
        assert!(hk_determinant(&g).is_one());
        for m in [2, 3, 5] {
            assert!(gs_hk_member(&g, m, &b()).unwrap());
        }
    }

    #[test]
    fn determinant_criterion_matches_set_product() {
        let inst = gs_build(&QuotientSpec::congruence(2), &b()).unwrap();
        let hk = brute_force_product(&inst.ctx, &inst.im_h, &inst.im_k).unwrap();
        for x in inst.ctx.enumerate().unwrap().iter() {
            assert_eq!(hk.contains(x), hk_member_projected(x));
        }
    }

    #[test]
    fn hk_witness_examples() {
        match gs_hk_witness(&i_element(), &b()).unwrap() {
            HkWitness::Certified { certificate, .. } => {
                assert_eq!(certificate.level.spec.m, 2);
                certificate.replay(&b()).unwrap();
            }
            other => panic!("{other:?}"),
        }
        // det(a + 1) = 2: every modulus certifies, the smallest is 2
        let g = GroupWord::additive(ZMat2::new(1, 0, 0, 0));
        assert_eq!(hk_determinant(&g), BigInt::from(2));
        assert!(matches!(
            gs_hk_witness(&g, &b()).unwrap(),
            HkWitness::Certified { ref certificate, .. } if certificate.level.spec.m == 2
        ));
        assert!(matches!(
            gs_hk_witness(&GroupWord::identity(), &b()).unwrap(),
            HkWitness::Inconclusive { .. }
        ));
    }

    #[test]
    fn orbit_identity() {
        let rep = minimal_noncongruence_rep(7, &b()).unwrap().unwrap();
        for m in 2..=4 {
            assert!(orbit_matches_image(&rep, m, &b()).unwrap());
        }
    }

    #[test]
    fn evidence_for_minimal_rep() {
        let rep = minimal_noncongruence_rep(7, &b()).unwrap().unwrap();
        let searches = searches_by_name(&DEFAULT_SEARCHES).unwrap();
        let ev = gs_wz_failure(&rep, 8, &searches, &b()).unwrap();
        assert!(ev.is_coherent(), "{ev:?}");
        verify_evidence(&ev, &b()).unwrap();
        let congruent = PermRep::principal_congruence(2, &b()).unwrap();
        assert!(gs_wz_failure(&congruent, 8, &searches, &b()).is_err());
    }
}
