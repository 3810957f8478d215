//! Finite-index subgroups of the modular group as transitive permutation
//! representations. The subgroup is the stabiliser of the basepoint `0`.
//!
//! Words act on the right: `0 · w₁w₂ = (0 · w₁) · w₂`. Representations satisfy
//! `s² = 1` and `(st)³ = 1`, so they factor through `PSL₂(ℤ)`; a matrix and its
//! negative act identically and the subgroup always contains `-I`.

use std::collections::VecDeque;
use std::path::Path;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::ZMat2;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{Group, Perm, SlQuotient};

use super::word::{matrix_to_word, Gen, ModularWord};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermRep {
    s: Perm,
    t: Perm,
}

/// On-disk form: `{"degree": d, "s": [...], "t": [...]}`, images 0-based.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PermRepFile {
    pub degree: usize,
    pub s: Vec<u32>,
    pub t: Vec<u32>,
}

impl PermRep {
    /// Validates both relations and transitivity.
    pub fn new(s: Perm, t: Perm) -> Result<Self> {
        if s.degree() != t.degree() {
            return Err(Error::InvalidRep(format!(
                "s has degree {} but t has degree {}",
                s.degree(),
                t.degree()
            )));
        }
        if s.degree() == 0 {
            return Err(Error::InvalidRep("degree must be positive".into()));
        }
        if !s.then(&s).is_identity() {
            return Err(Error::InvalidRep("s² ≠ 1".into()));
        }
        if !s.then(&t).pow(3).is_identity() {
            return Err(Error::InvalidRep("(st)³ ≠ 1".into()));
        }
        let rep = PermRep { s, t };
        if rep.orbit_of_basepoint().len() != rep.degree() {
            return Err(Error::InvalidRep("action is not transitive".into()));
        }
        Ok(rep)
    }

    pub fn from_images(s: Vec<u32>, t: Vec<u32>) -> Result<Self> {
        let s = Perm::new(s).map_err(|e| Error::InvalidRep(e.to_string()))?;
        let t = Perm::new(t).map_err(|e| Error::InvalidRep(e.to_string()))?;
        PermRep::new(s, t)
    }

    /// The whole modular group (degree 1).
    pub fn trivial() -> Self {
        PermRep {
            s: Perm::identity(1),
            t: Perm::identity(1),
        }
    }

    /// The action of the modular group on `PSL₂(ℤ/m)` by right multiplication;
    /// the basepoint stabiliser is the principal congruence subgroup of level `m`.
    pub fn principal_congruence(m: u64, budget: &Budget) -> Result<Self> {
        let ctx = SlQuotient::new(m, true, *budget)?;
        let all = ctx.enumerate()?;
        let (sg, tg) = (ctx.s(), ctx.t());
        let index = |x: &_| all.elements().get_index_of(x).expect("closed") as u32;
        let s = all.iter().map(|x| index(&ctx.mul(x, &sg))).collect();
        let t = all.iter().map(|x| index(&ctx.mul(x, &tg))).collect();
        Ok(PermRep {
            s: Perm::from_vec_unchecked(s),
            t: Perm::from_vec_unchecked(t),
        })
    }

    pub fn degree(&self) -> usize {
        self.s.degree()
    }

    pub fn perm_s(&self) -> &Perm {
        &self.s
    }

    pub fn perm_t(&self) -> &Perm {
        &self.t
    }

    fn orbit_of_basepoint(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut order = vec![0];
        seen[0] = true;
        let mut i = 0;
        while i < order.len() {
            let p = order[i];
            for q in [self.s.apply(p), self.t.apply(p)] {
                if !seen[q] {
                    seen[q] = true;
                    order.push(q);
                }
            }
            i += 1;
        }
        order
    }

    /// Image of a point under `gen^exp`.
    pub fn act_power(&self, point: usize, gen: Gen, exp: i64) -> usize {
        let perm = match gen {
            Gen::S => &self.s,
            Gen::T => &self.t,
        };
        // cycle length of `point`
        let mut len = 1;
        let mut q = perm.apply(point);
        while q != point {
            q = perm.apply(q);
            len += 1;
        }
        let steps = exp.rem_euclid(len as i64) as usize;
        let mut p = point;
        for _ in 0..steps {
            p = perm.apply(p);
        }
        p
    }

    pub fn act(&self, point: usize, w: &ModularWord) -> usize {
        w.syllables()
            .iter()
            .fold(point, |p, syl| self.act_power(p, syl.gen, syl.exp))
    }

    /// The permutation induced by a word.
    pub fn image(&self, w: &ModularWord) -> Perm {
        let images = (0..self.degree()).map(|p| self.act(p, w) as u32).collect();
        Perm::from_vec_unchecked(images)
    }

    /// Does the word lie in the subgroup (fix the basepoint)?
    pub fn contains(&self, w: &ModularWord) -> bool {
        self.act(0, w) == 0
    }

    pub fn contains_matrix(&self, x: &ZMat2) -> Result<bool> {
        Ok(self.contains(&matrix_to_word(x)?))
    }

    /// The level: lcm of the cycle lengths of `t` (the cusp widths).
    pub fn level(&self) -> u64 {
        self.t
            .cycle_lengths()
            .into_iter()
            .fold(1u64, |acc, c| acc.lcm(&(c as u64)))
    }

    pub fn cusp_widths(&self) -> Vec<usize> {
        let mut w = self.t.cycle_lengths();
        w.sort_unstable();
        w
    }

    /// Coset representatives `r_p` with `0 · r_p = p`, from a breadth-first
    /// spanning tree along `s` and `t` edges. Also returns the tree edges.
    fn spanning_tree(&self) -> (Vec<ModularWord>, Vec<[bool; 2]>) {
        let n = self.degree();
        let mut reps: Vec<Option<ModularWord>> = vec![None; n];
        let mut tree = vec![[false; 2]; n];
        reps[0] = Some(ModularWord::empty());
        let mut queue = VecDeque::from([0usize]);
        while let Some(p) = queue.pop_front() {
            let rp = reps[p].clone().expect("visited");
            for (k, gen) in [Gen::S, Gen::T].into_iter().enumerate() {
                let q = self.act_power(p, gen, 1);
                if reps[q].is_none() {
                    let mut w = rp.clone();
                    w.push(gen, 1);
                    reps[q] = Some(w);
                    tree[p][k] = true;
                    queue.push_back(q);
                }
            }
        }
        (
            reps.into_iter().map(|r| r.expect("transitive")).collect(),
            tree,
        )
    }

    pub fn coset_representatives(&self) -> Vec<ModularWord> {
        self.spanning_tree().0
    }

    /// Schreier generators of the basepoint stabiliser: `r_p · g · r_{p·g}⁻¹`
    /// for every non-tree edge `(p, g)`, in order of `p` then `g ∈ {S, T}`.
    /// Together they generate the full preimage of the subgroup in `SL₂(ℤ)`.
    pub fn subgroup_generators(&self) -> Vec<ModularWord> {
        let (reps, tree) = self.spanning_tree();
        let mut out = Vec::new();
        for p in 0..self.degree() {
            for (k, gen) in [Gen::S, Gen::T].into_iter().enumerate() {
                if tree[p][k] {
                    continue;
                }
                let q = self.act_power(p, gen, 1);
                let mut w = reps[p].clone();
                w.push(gen, 1);
                let w = w.concat(&reps[q].inverse());
                if !w.is_empty() {
                    out.push(w);
                }
            }
        }
        out
    }

    /// Relabel points in breadth-first order from the basepoint along `s`
    /// then `t`. Two representations define the same subgroup exactly when
    /// their canonical forms are equal.
    pub fn canonical(&self) -> PermRep {
        let order = self.orbit_of_basepoint();
        let mut relabel = vec![0u32; self.degree()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new as u32;
        }
        PermRep {
            s: self.s.relabel(&relabel),
            t: self.t.relabel(&relabel),
        }
    }

    /// Is the subgroup of `self` contained in the subgroup of `coarse`? If so,
    /// returns the equivariant map from `self`'s points to `coarse`'s points
    /// sending basepoint to basepoint.
    pub fn map_onto(&self, coarse: &PermRep) -> Option<Vec<usize>> {
        let n = self.degree();
        let mut f: Vec<Option<usize>> = vec![None; n];
        f[0] = Some(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(p) = queue.pop_front() {
            let fp = f[p].expect("visited");
            for gen in [Gen::S, Gen::T] {
                let q = self.act_power(p, gen, 1);
                let fq = coarse.act_power(fp, gen, 1);
                match f[q] {
                    None => {
                        f[q] = Some(fq);
                        queue.push_back(q);
                    }
                    Some(existing) if existing != fq => return None,
                    Some(_) => {}
                }
            }
        }
        f.into_iter().collect()
    }

    pub fn to_file(&self) -> PermRepFile {
        PermRepFile {
            degree: self.degree(),
            s: self.s.images().to_vec(),
            t: self.t.images().to_vec(),
        }
    }

    pub fn from_file(file: &PermRepFile) -> Result<Self> {
        if file.s.len() != file.degree || file.t.len() != file.degree {
            return Err(Error::InvalidRep(format!(
                "declared degree {} but s has {} images and t has {}",
                file.degree,
                file.s.len(),
                file.t.len()
            )));
        }
        PermRep::from_images(file.s.clone(), file.t.clone())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        // Numbers may be written as decimal strings, as in reports.
        let value = crate::report::destringify(serde_json::from_str(&text)?);
        let file: PermRepFile = serde_json::from_value(value)?;
        PermRep::from_file(&file)
    }
}

impl Serialize for PermRep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PermRep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = PermRepFile::deserialize(d)?;
        PermRep::from_file(&file).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::word::word_eval;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gamma2() -> PermRep {
        PermRep::principal_congruence(2, &Budget::default()).unwrap()
    }

    #[test]
    fn trivial_rep_contains_everything() {
        let r = PermRep::trivial();
        assert_eq!(r.level(), 1);
        assert!(r.contains(&ModularWord::empty()));
        assert!(r.contains(&"S T^5 S^-1".parse().unwrap()));
        let gens = r.subgroup_generators();
        assert_eq!(gens, vec![ModularWord::s(), ModularWord::t()]);
    }

    #[test]
    fn gamma2_membership_and_level() {
        let r = gamma2();
        assert_eq!(r.degree(), 6);
        assert_eq!(r.level(), 2);
        assert!(r.cusp_widths().iter().all(|&w| w == 2));
        assert!(!r.contains(&ModularWord::t()));
        assert!(r.contains(&ModularWord::t().pow(2)));
    }

    #[test]
    fn principal_membership_matches_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in [2u64, 3, 4, 5] {
            let r = PermRep::principal_congruence(m, &Budget::default()).unwrap();
            for _ in 0..300 {
                let w = ModularWord::random(&mut rng, 20);
                let x = word_eval(&w);
                assert_eq!(
                    r.contains(&w),
                    x.reduce(m).unwrap().is_plus_minus_identity()
                );
            }
        }
    }

    #[test]
    fn schreier_generators_fix_the_basepoint() {
        for m in [2u64, 3, 4] {
            let r = PermRep::principal_congruence(m, &Budget::default()).unwrap();
            for w in r.subgroup_generators() {
                assert!(r.contains(&w), "{w}");
            }
            for (p, w) in r.coset_representatives().iter().enumerate() {
                assert_eq!(r.act(0, w), p);
            }
        }
    }

    #[test]
    fn validation() {
        // s not an involution
        assert!(PermRep::from_images(vec![1, 2, 0], vec![0, 1, 2]).is_err());
        // not transitive
        assert!(PermRep::from_images(vec![0, 1], vec![0, 1]).is_err());
        // (st)³ ≠ 1
        assert!(PermRep::from_images(vec![1, 0], vec![0, 1]).is_err());
        let f = PermRepFile {
            degree: 3,
            s: vec![0],
            t: vec![0],
        };
        assert!(PermRep::from_file(&f).is_err());
    }

    #[test]
    fn canonical_form_is_relabeling_invariant() {
        let r = gamma2();
        let swap: Vec<u32> = vec![0, 2, 1, 4, 3, 5];
        let relabeled = PermRep::new(r.perm_s().relabel(&swap), r.perm_t().relabel(&swap)).unwrap();
        assert_eq!(relabeled.canonical(), r.canonical());
    }

    #[test]
    fn containment_map() {
        let g2 = gamma2();
        let g4 = PermRep::principal_congruence(4, &Budget::default()).unwrap();
        assert!(g4.map_onto(&g2).is_some());
        assert!(g2.map_onto(&g4).is_none());
        assert!(g2.map_onto(&PermRep::trivial()).is_some());
    }

    #[test]
    fn json_round_trip() {
        let r = gamma2();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with("{\"degree\":6"));
        let back: PermRep = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<PermRep>(r#"{"degree":2,"s":[0,1],"t":[0,1]}"#).is_err());
    }
}
