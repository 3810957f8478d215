//! Low-index subgroups of `PSL₂(ℤ) ≅ C₂ * C₃`.
//!
//! A subgroup of index `d` is a transitive action on `d` points with a
//! basepoint, given by an involution `x` (the image of `S`) and an element `y`
//! of order dividing 3 (the image of `ST`). Actions are built in standard
//! form: points are numbered in the order they first appear while scanning
//! `(p, x), (p, y)` for `p = 0, 1, …`, so each subgroup is produced once.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::Perm;

use super::rep::PermRep;

struct Search {
    cap: usize,
    x: Vec<Option<usize>>,
    y: Vec<Option<usize>>,
    y_inv: Vec<Option<usize>>,
    used: usize,
    found: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Search {
    fn new(cap: usize) -> Self {
        Search {
            cap,
            x: vec![None; cap],
            y: vec![None; cap],
            y_inv: vec![None; cap],
            used: 1,
            found: Vec::new(),
        }
    }

    /// Length of the `y`-chain through `p`, and whether it closes up.
    fn y_chain(&self, p: usize) -> (usize, bool) {
        let mut len = 1;
        let mut q = p;
        while let Some(next) = self.y[q] {
            if next == p {
                return (len, true);
            }
            q = next;
            len += 1;
        }
        let mut q = p;
        while let Some(prev) = self.y_inv[q] {
            q = prev;
            len += 1;
        }
        (len, false)
    }

    fn y_ok(&self, p: usize) -> bool {
        match self.y_chain(p) {
            (len, true) => len == 1 || len == 3,
            (len, false) => len <= 3,
        }
    }

    fn run(&mut self, pos: usize) {
        let p = pos / 2;
        if p >= self.used {
            let x = self.x[..self.used]
                .iter()
                .map(|v| v.expect("complete"))
                .collect();
            let y = self.y[..self.used]
                .iter()
                .map(|v| v.expect("complete"))
                .collect();
            self.found.push((x, y));
            return;
        }
        if pos % 2 == 0 {
            if self.x[p].is_some() {
                return self.run(pos + 1);
            }
            let mut targets: Vec<usize> = (p..self.used).filter(|&q| self.x[q].is_none()).collect();
            if self.used < self.cap {
                targets.push(self.used);
            }
            for q in targets {
                let fresh = q == self.used;
                if fresh {
                    self.used += 1;
                }
                self.x[p] = Some(q);
                self.x[q] = Some(p);
                self.run(pos + 1);
                self.x[p] = None;
                self.x[q] = None;
                if fresh {
                    self.used -= 1;
                }
            }
        } else {
            if self.y[p].is_some() {
                return self.run(pos + 1);
            }
            let mut targets: Vec<usize> = (0..self.used)
                .filter(|&q| self.y_inv[q].is_none())
                .collect();
            if self.used < self.cap {
                targets.push(self.used);
            }
            for q in targets {
                let fresh = q == self.used;
                if fresh {
                    self.used += 1;
                }
                self.y[p] = Some(q);
                self.y_inv[q] = Some(p);
                if self.y_ok(p) {
                    self.run(pos + 1);
                }
                self.y[p] = None;
                self.y_inv[q] = None;
                if fresh {
                    self.used -= 1;
                }
            }
        }
    }
}

/// All subgroups of `PSL₂(ℤ)` of index at most `d_max`, as canonical
/// representations sorted by degree, then `s`, then `t`.
pub fn low_index_reps(d_max: usize, budget: &Budget) -> Result<Vec<PermRep>> {
    if d_max as u64 > budget.degree {
        return Err(Error::budget("low-index degree", budget.degree));
    }
    if d_max == 0 {
        return Ok(Vec::new());
    }
    let mut search = Search::new(d_max);
    search.run(0);
    let mut reps = Vec::with_capacity(search.found.len());
    for (x, y) in search.found {
        let s: Vec<u32> = x.iter().map(|&v| v as u32).collect();
        // T = S⁻¹ · (ST): apply s first, then y
        let t: Vec<u32> = x.iter().map(|&v| y[v] as u32).collect();
        let rep = PermRep::new(Perm::new(s)?, Perm::new(t)?)?;
        reps.push(rep.canonical());
    }
    reps.sort_by(|a, b| {
        (a.degree(), a.perm_s(), a.perm_t()).cmp(&(b.degree(), b.perm_s(), b.perm_t()))
    });
    reps.dedup();
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_is_the_whole_group() {
        let reps = low_index_reps(1, &Budget::default()).unwrap();
        assert_eq!(reps, vec![PermRep::trivial()]);
    }

    #[test]
    fn every_rep_is_valid_and_canonical() {
        for r in low_index_reps(6, &Budget::default()).unwrap() {
            let checked = PermRep::new(r.perm_s().clone(), r.perm_t().clone()).unwrap();
            assert_eq!(checked.canonical(), r);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = low_index_reps(13, &Budget::default()).unwrap_err();
        assert!(err.is_budget());
    }
}
