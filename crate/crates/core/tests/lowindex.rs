//! Low-index enumeration against an independent count.
//!
//! Subgroups of index `d` correspond to transitive actions on `d` points with
//! a basepoint, up to relabelings fixing it. Counting labeled transitive
//! pairs `(x, y)` with `x² = y³ = 1` directly and dividing by `(d-1)!` gives
//! the number of subgroups without any canonical-form machinery.

use cosetope::modular::{is_congruence, low_index_reps, PermRep};
use cosetope::Budget;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn transitive(x: &[usize], y: &[usize]) -> bool {
    let mut seen = vec![false; x.len()];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(p) = stack.pop() {
        for q in [x[p], y[p]] {
            if !seen[q] {
                seen[q] = true;
                count += 1;
                stack.push(q);
            }
        }
    }
    count == x.len()
}

fn labeled_count(d: usize) -> usize {
    let all = permutations(d);
    let inv: Vec<&Vec<usize>> = all
        .iter()
        .filter(|p| (0..d).all(|i| p[p[i]] == i))
        .collect();
    let ord3: Vec<&Vec<usize>> = all
        .iter()
        .filter(|p| (0..d).all(|i| p[p[p[i]]] == i))
        .collect();
    let mut n = 0;
    for x in &inv {
        for y in &ord3 {
            if transitive(x, y) {
                n += 1;
            }
        }
    }
    n
}

#[test]
fn counts_match_labeled_enumeration() {
    let reps = low_index_reps(7, &Budget::default()).unwrap();
    let mut factorial = 1;
    for d in 1..=7 {
        if d > 1 {
            factorial *= d - 1;
        }
        let expected = labeled_count(d) / factorial;
        let got = reps.iter().filter(|r| r.degree() == d).count();
        assert_eq!(got, expected, "degree {d}");
    }
}

#[test]
fn no_duplicates_up_to_relabeling() {
    let reps = low_index_reps(6, &Budget::default()).unwrap();
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            if a.degree() == b.degree() {
                // equal subgroups have identical Schreier-generator membership
                let same = a.subgroup_generators().iter().all(|w| b.contains(w))
                    && b.subgroup_generators().iter().all(|w| a.contains(w));
                assert!(!same, "{a:?} and {b:?} describe the same subgroup");
            }
        }
    }
}

#[test]
fn congruence_verdict_agrees_with_direct_containment() {
    let b = Budget::default();
    for rep in low_index_reps(7, &b).unwrap() {
        let v = is_congruence(&rep, &b).unwrap();
        let direct = cosetope::modular::contains_principal_congruence(&rep, v.level, &b).unwrap();
        assert_eq!(v.congruence, direct, "{rep:?}");
    }
}

#[test]
fn principal_congruence_reps_are_congruence() {
    let b = Budget::default();
    for m in 2..=6 {
        let rep = PermRep::principal_congruence(m, &b).unwrap();
        let v = is_congruence(&rep, &b).unwrap();
        assert!(v.congruence);
        assert_eq!(v.level, m);
    }
}
