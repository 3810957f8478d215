use crate::arith::ModMat2;
use crate::budget::Budget;
use crate::error::{Error, Result};

use super::{Group, Perm};

/// `SL₂(ℤ/m)`, or `PSL₂(ℤ/m)` when `projective` is set (elements are then
/// stored in their canonical `±` form).
#[derive(Clone, Debug)]
pub struct SlQuotient {
    m: u64,
    projective: bool,
    budget: Budget,
}

impl SlQuotient {
    pub fn new(m: u64, projective: bool, budget: Budget) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidModulus(m as i128));
        }
        if m > budget.modulus {
            return Err(Error::budget("modulus", budget.modulus));
        }
        Ok(SlQuotient {
            m,
            projective,
            budget,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    /// Canonical form of a matrix in this context.
    pub fn element(&self, x: ModMat2) -> ModMat2 {
        if self.projective {
            x.projective()
        } else {
            x
        }
    }

    pub fn s(&self) -> ModMat2 {
        self.element(ModMat2::new(0, -1, 1, 0, self.m).expect("valid modulus"))
    }

    pub fn t(&self) -> ModMat2 {
        self.element(ModMat2::new(1, 1, 0, 1, self.m).expect("valid modulus"))
    }
}

/// `|SL₂(ℤ/m)| = m³ ∏_{p | m} (1 - p⁻²)`.
pub fn sl2_order(m: u64) -> u64 {
    let mut order = m * m * m;
    let mut rest = m;
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            order = order / (p * p) * (p * p - 1);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        order = order / (rest * rest) * (rest * rest - 1);
    }
    order
}

impl Group for SlQuotient {
    type Elem = ModMat2;

    fn identity(&self) -> ModMat2 {
        self.element(ModMat2::identity(self.m).expect("valid modulus"))
    }

    fn mul(&self, x: &ModMat2, y: &ModMat2) -> ModMat2 {
        self.element(x.mul_same(y))
    }

    fn inv(&self, x: &ModMat2) -> ModMat2 {
        self.element(x.adjugate())
    }

    fn generators(&self) -> Vec<ModMat2> {
        vec![self.s(), self.t()]
    }

    fn budget(&self) -> &Budget {
        &self.budget
    }

    fn order(&self) -> Option<u64> {
        let n = sl2_order(self.m);
        Some(if self.projective && self.m > 2 {
            n / 2
        } else {
            n
        })
    }
}

/// A permutation group given by generators.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    budget: Budget,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>, budget: Budget) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(Error::ParameterMismatch(format!(
                "generator {g:?} does not have degree {degree}"
            )));
        }
        Ok(PermGroup {
            degree,
            gens,
            budget,
        })
    }

    /// The full symmetric group, generated by a transposition and an n-cycle.
    pub fn symmetric(n: usize, budget: Budget) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            let mut swap: Vec<u32> = (0..n as u32).collect();
            swap.swap(0, 1);
            gens.push(Perm::from_vec_unchecked(swap));
            let cycle: Vec<u32> = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
            gens.push(Perm::from_vec_unchecked(cycle));
        }
        PermGroup {
            degree: n,
            gens,
            budget,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

impl Group for PermGroup {
    type Elem = Perm;

    fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }

    fn mul(&self, x: &Perm, y: &Perm) -> Perm {
        x.then(y)
    }

    fn inv(&self, x: &Perm) -> Perm {
        x.inverse()
    }

    fn generators(&self) -> Vec<Perm> {
        self.gens.clone()
    }

    fn budget(&self) -> &Budget {
        &self.budget
    }
}
