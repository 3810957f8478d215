//! Congruence testing and congruence-gap witnesses.
//!
//! A subgroup of level `n` is a congruence subgroup exactly when it contains
//! the principal congruence subgroup `Γ(n)`, i.e. when its image in
//! `PSL₂(ℤ/n)` has the same index as the subgroup itself. For a
//! non-congruence subgroup `H′` a gap witness is an element `x ∈ Γ(L)` with
//! `x ∉ H′`: it lies in `H′Γ(m)` for every `m | L`, yet not in `H′`.

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::{ModMat2, ZMat2};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{subgroup_closure, GeneratedSubgroup, Group, SlQuotient};
use crate::registry::Registry;

use super::rep::PermRep;
use super::word::{matrix_to_word, word_eval, word_eval_mod, ModularWord};

/// Image of the subgroup's full preimage in `SL₂(ℤ/m)`, or in `PSL₂(ℤ/m)`
/// when `projective` is set.
pub fn image_mod(
    rep: &PermRep,
    m: u64,
    projective: bool,
    budget: &Budget,
) -> Result<(SlQuotient, GeneratedSubgroup<ModMat2>)> {
    let ctx = SlQuotient::new(m, projective, *budget)?;
    let gens = rep
        .subgroup_generators()
        .iter()
        .map(|w| Ok(ctx.element(word_eval_mod(w, m)?)))
        .collect::<Result<Vec<_>>>()?;
    let image = subgroup_closure(&ctx, &gens)?;
    Ok((ctx, image))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceVerdict {
    pub degree: usize,
    pub level: u64,
    /// Index of the subgroup's image in `PSL₂(ℤ/level)`.
    pub image_index: u64,
    pub congruence: bool,
}

pub fn is_congruence(rep: &PermRep, budget: &Budget) -> Result<CongruenceVerdict> {
    let level = rep.level();
    let degree = rep.degree();
    if level == 1 {
        // t acts trivially, so s does too and the subgroup is everything
        return Ok(CongruenceVerdict {
            degree,
            level,
            image_index: 1,
            congruence: degree == 1,
        });
    }
    if level > budget.modulus {
        return Err(Error::budget("congruence level modulus", budget.modulus));
    }
    let (ctx, image) = image_mod(rep, level, true, budget)?;
    let order = ctx.order().expect("known order");
    let image_index = order / image.size() as u64;
    Ok(CongruenceVerdict {
        degree,
        level,
        image_index,
        congruence: image_index == degree as u64,
    })
}

/// Does the subgroup contain `Γ(n)`? Checked directly: every Schreier
/// generator of the principal congruence subgroup must fix the basepoint.
pub fn contains_principal_congruence(rep: &PermRep, n: u64, budget: &Budget) -> Result<bool> {
    if n == 1 {
        return Ok(rep.degree() == 1);
    }
    let gamma = PermRep::principal_congruence(n, budget)?;
    Ok(gamma.subgroup_generators().iter().all(|w| rep.contains(w)))
}

/// Smallest multiple `L` of the level such that, for every `m ≤ m_max`, the
/// part of `m` built from primes dividing the level also divides `L`.
pub fn coverage_level(level: u64, m_max: u64) -> u64 {
    let mut l = level.max(1);
    let mut rest = level;
    let mut p = 2;
    while rest > 1 {
        if rest % p == 0 {
            while rest % p == 0 {
                rest /= p;
            }
            let mut q = p;
            while q * p <= m_max {
                q *= p;
            }
            l = l.lcm(&q);
        }
        p += 1;
    }
    l
}

/// A family of candidate elements of `Γ(L)` to test against a subgroup.
pub trait WitnessSearch: Send + Sync {
    fn name(&self) -> &'static str;
    fn candidates<'a>(
        &'a self,
        level: u64,
        budget: &Budget,
    ) -> Result<Box<dyn Iterator<Item = ZMat2> + 'a>>;
}

/// `T^L`, `U^L`, their short products and their conjugates by short words.
///
/// When the subgroup's level divides `L`, every such element acts trivially
/// on the cosets and so can never be a witness; the strategy is kept because
/// it is the cheapest and covers levels that do not divide `L`.
pub struct SeedSearch;

impl WitnessSearch for SeedSearch {
    fn name(&self) -> &'static str {
        "seeds"
    }

    fn candidates<'a>(
        &'a self,
        level: u64,
        _budget: &Budget,
    ) -> Result<Box<dyn Iterator<Item = ZMat2> + 'a>> {
        let l = level as i64;
        let tl = ModularWord::power(super::word::Gen::T, l);
        let ul = ModularWord::u().pow(1).inverse().inverse();
        let ul = (0..l).fold(ModularWord::empty(), |acc, _| acc.concat(&ul));
        let mut seeds = vec![tl.clone(), ul.clone(), tl.inverse(), ul.inverse()];
        let base = seeds.clone();
        for a in &base {
            for b in &base {
                let p = a.concat(b);
                if !p.is_empty() {
                    seeds.push(p);
                }
            }
        }
        let letters = ["S", "S^-1", "T", "T^-1"].map(|s| s.parse::<ModularWord>().expect("letter"));
        let mut conjugators = vec![];
        for a in &letters {
            conjugators.push(a.clone());
            for b in &letters {
                let w = a.concat(b);
                if !w.is_empty() {
                    conjugators.push(w);
                }
            }
        }
        let mut out: Vec<ModularWord> = seeds.clone();
        for g in &conjugators {
            for c in &seeds {
                out.push(g.concat(c).concat(&g.inverse()));
            }
        }
        Ok(Box::new(out.into_iter().map(|w| word_eval(&w))))
    }
}

/// Elements of `Γ(L)` (and of `-Γ(L)`) of small height, enumerated shell by
/// shell: `[[ε + La, Lb], [Lc, ε + Ld]]` with `ε = ±1` and `d` solved from
/// the determinant.
pub struct SmallEntrySearch;

fn shell(radius: i64) -> impl Iterator<Item = (i64, i64, i64)> {
    let r = radius;
    (-r..=r).flat_map(move |a| {
        (-r..=r).flat_map(move |b| {
            (-r..=r)
                .filter(move |c| a.abs().max(b.abs()).max(c.abs()) == r)
                .map(move |c| (a, b, c))
        })
    })
}

fn solve_entry(l: i128, eps: i128, a: i128, b: i128, c: i128) -> Option<ZMat2> {
    // (ε + La)(ε + Ld) - L²bc = 1
    let top_left = eps + l * a;
    if top_left == 0 {
        return None;
    }
    let num = 1 + l * l * b * c;
    if num % top_left != 0 {
        return None;
    }
    let bottom_right = num / top_left;
    if (bottom_right - eps) % l != 0 {
        return None;
    }
    let x = ZMat2::new(
        BigInt::from(top_left),
        BigInt::from(l * b),
        BigInt::from(l * c),
        BigInt::from(bottom_right),
    );
    debug_assert!(num_traits::One::is_one(&x.det()));
    Some(x)
}

impl WitnessSearch for SmallEntrySearch {
    fn name(&self) -> &'static str {
        "small-entries"
    }

    fn candidates<'a>(
        &'a self,
        level: u64,
        _budget: &Budget,
    ) -> Result<Box<dyn Iterator<Item = ZMat2> + 'a>> {
        let l = level as i128;
        let it = (1i64..).flat_map(move |r| {
            shell(r).flat_map(move |(a, b, c)| {
                [1i128, -1]
                    .into_iter()
                    .filter_map(move |eps| solve_entry(l, eps, a as i128, b as i128, c as i128))
            })
        });
        Ok(Box::new(it))
    }
}

/// Schreier generators of `Γ(L)` itself. They generate the whole principal
/// congruence subgroup, so one of them escapes any subgroup not containing
/// it; the cost is a permutation representation of degree `|PSL₂(ℤ/L)|`.
pub struct PrincipalSchreierSearch;

impl WitnessSearch for PrincipalSchreierSearch {
    fn name(&self) -> &'static str {
        "principal-schreier"
    }

    fn candidates<'a>(
        &'a self,
        level: u64,
        budget: &Budget,
    ) -> Result<Box<dyn Iterator<Item = ZMat2> + 'a>> {
        if level < 2 {
            return Ok(Box::new(std::iter::empty()));
        }
        let gamma = PermRep::principal_congruence(level, budget)?;
        let gens = gamma.subgroup_generators();
        Ok(Box::new(gens.into_iter().map(|w| word_eval(&w))))
    }
}

pub fn witness_registry() -> Registry<dyn WitnessSearch> {
    let mut r: Registry<dyn WitnessSearch> = Registry::new("witness search");
    r.register("seeds", |_: &Value| Ok(Box::new(SeedSearch)));
    r.register("small-entries", |_: &Value| Ok(Box::new(SmallEntrySearch)));
    r.register("principal-schreier", |_: &Value| {
        Ok(Box::new(PrincipalSchreierSearch))
    });
    r
}

pub const DEFAULT_SEARCHES: [&str; 3] = ["seeds", "small-entries", "principal-schreier"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapWitness {
    /// The element `x`, a member of `±Γ(level)` outside the subgroup.
    pub matrix: ZMat2,
    pub word: ModularWord,
    pub level: u64,
    /// Where the word sends the basepoint; never `0`.
    pub basepoint_image: usize,
    /// Moduli `m` with `x mod m` in the image of the subgroup.
    pub levels_verified: Vec<u64>,
    /// Moduli checked where `x mod m` is outside the image.
    pub levels_failed: Vec<u64>,
    pub strategy: String,
    pub candidates_examined: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum WitnessOutcome {
    Found(GapWitness),
    Inconclusive {
        level: u64,
        strategies: Vec<String>,
        candidates_examined: u64,
    },
}

/// Membership of `x mod m` in the image of the subgroup in `SL₂(ℤ/m)`.
/// The image always contains `-I` (it fixes every coset), so `±I` is
/// accepted without building the closure.
pub fn reduced_member(rep: &PermRep, x: &ZMat2, m: u64, budget: &Budget) -> Result<bool> {
    let xm = x.reduce(m)?;
    if xm.is_plus_minus_identity() {
        return Ok(true);
    }
    let (_, image) = image_mod(rep, m, false, budget)?;
    Ok(image.contains(&xm))
}

/// Moduli checked for a witness: every `m ≤ m_max`, plus divisors of `L`
/// above `m_max`.
pub fn levels_to_check(level: u64, m_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (2..=m_max).collect();
    out.extend((m_max + 1..=level).filter(|d| level % d == 0));
    out
}

fn check_levels(
    rep: &PermRep,
    x: &ZMat2,
    levels: &[u64],
    budget: &Budget,
) -> Result<(Vec<u64>, Vec<u64>)> {
    let results = levels
        .par_iter()
        .map(|&m| reduced_member(rep, x, m, budget).map(|ok| (m, ok)))
        .collect::<Result<Vec<_>>>()?;
    let verified = results.iter().filter(|r| r.1).map(|r| r.0).collect();
    let failed = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    Ok((verified, failed))
}

/// Search `±Γ(level)` for an element outside the subgroup of a
/// non-congruence representation, trying `searches` in order until the
/// witness budget is spent.
pub fn congruence_gap_witness(
    rep: &PermRep,
    level: u64,
    m_max: u64,
    searches: &[Box<dyn WitnessSearch>],
    budget: &Budget,
) -> Result<WitnessOutcome> {
    if level < 1 {
        return Err(Error::Precondition("witness level must be positive".into()));
    }
    let verdict = is_congruence(rep, budget)?;
    if verdict.congruence {
        return Err(Error::Precondition(format!(
            "subgroup of degree {} is a congruence subgroup of level {}",
            verdict.degree, verdict.level
        )));
    }
    let mut examined = 0u64;
    for search in searches {
        let candidates = match search.candidates(level, budget) {
            Ok(c) => c,
            // a strategy that does not fit the budget is skipped, not fatal
            Err(e) if e.is_budget() => continue,
            Err(e) => return Err(e),
        };
        for x in candidates {
            if examined >= budget.witness {
                break;
            }
            examined += 1;
            if level > 1 && !x.reduce(level)?.is_plus_minus_identity() {
                continue;
            }
            let word = matrix_to_word(&x)?;
            let image = rep.act(0, &word);
            if image != 0 {
                let levels = levels_to_check(level, m_max);
                let (levels_verified, levels_failed) = check_levels(rep, &x, &levels, budget)?;
                return Ok(WitnessOutcome::Found(GapWitness {
                    matrix: x,
                    word,
                    level,
                    basepoint_image: image,
                    levels_verified,
                    levels_failed,
                    strategy: search.name().to_string(),
                    candidates_examined: examined,
                }));
            }
        }
    }
    Ok(WitnessOutcome::Inconclusive {
        level,
        strategies: searches.iter().map(|s| s.name().to_string()).collect(),
        candidates_examined: examined,
    })
}

/// Re-check a witness from its recorded data, without searching.
pub fn verify_gap_witness(rep: &PermRep, w: &GapWitness, budget: &Budget) -> Result<()> {
    let fail = |msg: String| {
        Err(Error::Precondition(format!(
            "witness does not replay: {msg}"
        )))
    };
    if !num_traits::One::is_one(&w.matrix.det()) {
        return fail("determinant is not 1".into());
    }
    if word_eval(&w.word) != w.matrix {
        return fail("word does not evaluate to the matrix".into());
    }
    if w.level > 1 && !w.matrix.reduce(w.level)?.is_plus_minus_identity() {
        return fail(format!("matrix is not ±I modulo {}", w.level));
    }
    let image = rep.act(0, &w.word);
    if image == 0 || image != w.basepoint_image {
        return fail(format!("basepoint goes to {image}"));
    }
    let mut levels = w.levels_verified.clone();
    levels.extend(&w.levels_failed);
    levels.sort_unstable();
    let (verified, failed) = check_levels(rep, &w.matrix, &levels, budget)?;
    let mut expect_v = w.levels_verified.clone();
    expect_v.sort_unstable();
    let mut expect_f = w.levels_failed.clone();
    expect_f.sort_unstable();
    if verified != expect_v || failed != expect_f {
        return fail("per-level memberships differ".into());
    }
    Ok(())
}

/// Build the default search chain by name.
pub fn searches_by_name(names: &[&str]) -> Result<Vec<Box<dyn WitnessSearch>>> {
    let registry = witness_registry();
    names
        .iter()
        .map(|n| registry.build(n, &Value::Null))
        .collect()
}
