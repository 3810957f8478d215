use serde::Serialize;

use crate::arith::ModMat2;
use crate::error::{Error, Result};

use super::Perm;

/// An element `(a, p)` of `M₂(ℤ/m) ⋊ P`, where `P` is the image of the
/// modular group in `SL₂(ℤ/m)`, optionally paired with a permutation image.
///
/// The linear part acts on the additive part by left multiplication:
/// `(a₁, h₁)(a₂, h₂) = (a₁ + h₁a₂, h₁h₂)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SdElement {
    pub a: ModMat2,
    pub h: ModMat2,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Perm>,
}

impl SdElement {
    pub fn new(a: ModMat2, h: ModMat2, sigma: Option<Perm>) -> Result<Self> {
        if a.modulus() != h.modulus() {
            return Err(Error::ModulusMismatch(a.modulus(), h.modulus()));
        }
        if !h.det().is_one() {
            return Err(Error::NotUnimodular(h.det().to_string()));
        }
        Ok(SdElement { a, h, sigma })
    }

    pub fn identity(m: u64, degree: Option<usize>) -> Result<Self> {
        Ok(SdElement {
            a: ModMat2::zero(m)?,
            h: ModMat2::identity(m)?,
            sigma: degree.map(Perm::identity),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.a.modulus()
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_zero()
            && self.h.is_identity()
            && self.sigma.as_ref().is_none_or(|s| s.is_identity())
    }

    /// Whether the element lies in the additive fibre `M₂(ℤ/m)`.
    pub fn in_fibre(&self) -> bool {
        self.h.is_identity() && self.sigma.as_ref().is_none_or(|s| s.is_identity())
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, y: &SdElement) -> SdElement {
        SdElement {
            a: self.a.add_same(&self.h.mul_same(&y.a)),
            h: self.h.mul_same(&y.h),
            sigma: match (&self.sigma, &y.sigma) {
                (Some(s), Some(t)) => Some(s.then(t)),
                _ => None,
            },
        }
    }

    #[inline]
    pub(crate) fn inv_unchecked(&self) -> SdElement {
        let hi = self.h.adjugate();
        SdElement {
            a: hi.mul_same(&self.a).neg(),
            h: hi,
            sigma: self.sigma.as_ref().map(Perm::inverse),
        }
    }
}

fn compatible(x: &SdElement, y: &SdElement) -> Result<()> {
    if x.modulus() != y.modulus() {
        return Err(Error::ModulusMismatch(x.modulus(), y.modulus()));
    }
    let dx = x.sigma.as_ref().map(Perm::degree);
    let dy = y.sigma.as_ref().map(Perm::degree);
    if dx != dy {
        return Err(Error::ParameterMismatch(format!(
            "permutation components differ: {dx:?} vs {dy:?}"
        )));
    }
    Ok(())
}

/// `(a₁ + h₁a₂, h₁h₂, σ₁σ₂)`.
pub fn sd_mul(x: &SdElement, y: &SdElement) -> Result<SdElement> {
    compatible(x, y)?;
    Ok(x.mul_unchecked(y))
}

/// `(-h⁻¹a, h⁻¹, σ⁻¹)`.
pub fn sd_inv(x: &SdElement) -> SdElement {
    x.inv_unchecked()
}
