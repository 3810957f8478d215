//! Residues and 2×2 matrices over ℤ and ℤ/m.
//!
//! Ambient matrices carry arbitrary-precision entries because words in the
//! modular generators grow quickly. Quotient matrices carry canonical
//! residues in `[0, m)`; negative inputs are reduced with floored modulo.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted for quotient arithmetic. Entry products are
/// formed in `u64`, so anything below 2³² is exact.
pub const MAX_MODULUS: u64 = u32::MAX as u64;

fn check_modulus(m: i128) -> Result<u32> {
    if m < 2 || m as u128 > MAX_MODULUS as u128 {
        return Err(Error::InvalidModulus(m));
    }
    Ok(m as u32)
}

/// Canonical representative of `x` modulo `m`, in `[0, m)`.
pub fn reduce_int(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("floored residue fits in u64")
}

fn reduce_i64(x: i64, m: u32) -> u32 {
    x.rem_euclid(m as i64) as u32
}

/// An element of ℤ/m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        let m = check_modulus(modulus as i128)? as i64;
        Ok(Residue {
            value: value.rem_euclid(m) as u64,
            modulus,
        })
    }

    pub fn from_bigint(value: &BigInt, modulus: u64) -> Result<Self> {
        check_modulus(modulus as i128)?;
        Ok(Residue {
            value: reduce_int(value, modulus),
            modulus,
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    fn same(&self, other: &Residue) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Residue) -> Result<Residue> {
        self.same(other)?;
        Ok(Residue {
            value: (self.value + other.value) % self.modulus,
            modulus: self.modulus,
        })
    }

    pub fn try_sub(&self, other: &Residue) -> Result<Residue> {
        self.same(other)?;
        Ok(Residue {
            value: (self.value + self.modulus - other.value) % self.modulus,
            modulus: self.modulus,
        })
    }

    pub fn try_mul(&self, other: &Residue) -> Result<Residue> {
        self.same(other)?;
        let v = (self.value as u128 * other.value as u128) % self.modulus as u128;
        Ok(Residue {
            value: v as u64,
            modulus: self.modulus,
        })
    }

    pub fn neg(&self) -> Residue {
        Residue {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// A 2×2 integer matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZMat2 {
    e: [BigInt; 4],
}

impl ZMat2 {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Self {
        ZMat2 {
            e: [a.into(), b.into(), c.into(), d.into()],
        }
    }

    pub fn from_entries(e: [BigInt; 4]) -> Self {
        ZMat2 { e }
    }

    pub fn identity() -> Self {
        ZMat2::new(1, 0, 0, 1)
    }

    pub fn zero() -> Self {
        ZMat2::new(0, 0, 0, 0)
    }

    pub fn scalar(k: impl Into<BigInt>) -> Self {
        let k = k.into();
        ZMat2::new(k.clone(), 0, 0, k)
    }

    pub fn entries(&self) -> &[BigInt; 4] {
        &self.e
    }

    pub fn det(&self) -> BigInt {
        &self.e[0] * &self.e[3] - &self.e[1] * &self.e[2]
    }

    pub fn is_identity(&self) -> bool {
        self.e[0].is_one() && self.e[1].is_zero() && self.e[2].is_zero() && self.e[3].is_one()
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse_unimodular(&self) -> Result<ZMat2> {
        let det = self.det();
        if !det.is_one() {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        let [a, b, c, d] = &self.e;
        Ok(ZMat2::from_entries([d.clone(), -b, -c, a.clone()]))
    }

    /// Entrywise reduction modulo `m`.
    pub fn reduce(&self, m: u64) -> Result<ModMat2> {
        let m32 = check_modulus(m as i128)?;
        let mut e = [0u32; 4];
        for (slot, x) in e.iter_mut().zip(&self.e) {
            *slot = reduce_int(x, m) as u32;
        }
        Ok(ModMat2 { e, m: m32 })
    }

    /// Largest absolute value among the entries.
    pub fn height(&self) -> BigInt {
        self.e.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    /// Entries as decimal strings, row-major.
    pub fn to_strings(&self) -> [[String; 2]; 2] {
        [
            [self.e[0].to_string(), self.e[1].to_string()],
            [self.e[2].to_string(), self.e[3].to_string()],
        ]
    }

    pub fn from_strings(rows: &[[String; 2]; 2]) -> Result<ZMat2> {
        let parse = |s: &String| {
            s.parse::<BigInt>()
                .map_err(|_| Error::Invalid(format!("not a decimal integer: {s:?}")))
        };
        Ok(ZMat2::from_entries([
            parse(&rows[0][0])?,
            parse(&rows[0][1])?,
            parse(&rows[1][0])?,
            parse(&rows[1][1])?,
        ]))
    }
}

impl Mul for &ZMat2 {
    type Output = ZMat2;

    fn mul(self, y: &ZMat2) -> ZMat2 {
        let [a, b, c, d] = &self.e;
        let [p, q, r, s] = &y.e;
        ZMat2::from_entries([a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s])
    }
}

impl Add for &ZMat2 {
    type Output = ZMat2;

    fn add(self, y: &ZMat2) -> ZMat2 {
        ZMat2::from_entries([
            &self.e[0] + &y.e[0],
            &self.e[1] + &y.e[1],
            &self.e[2] + &y.e[2],
            &self.e[3] + &y.e[3],
        ])
    }
}

impl Sub for &ZMat2 {
    type Output = ZMat2;

    fn sub(self, y: &ZMat2) -> ZMat2 {
        ZMat2::from_entries([
            &self.e[0] - &y.e[0],
            &self.e[1] - &y.e[1],
            &self.e[2] - &y.e[2],
            &self.e[3] - &y.e[3],
        ])
    }
}

impl Neg for &ZMat2 {
    type Output = ZMat2;

    fn neg(self) -> ZMat2 {
        ZMat2::from_entries([-&self.e[0], -&self.e[1], -&self.e[2], -&self.e[3]])
    }
}

impl fmt::Display for ZMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.e[0], self.e[1], self.e[2], self.e[3]
        )
    }
}

impl Serialize for ZMat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZMat2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // entries are decimal strings; plain integers are accepted as well
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Entry {
            Text(String),
            Signed(i64),
            Unsigned(u64),
        }
        let rows = <[[Entry; 2]; 2]>::deserialize(d)?;
        let rows = rows.map(|row| {
            row.map(|e| match e {
                Entry::Text(s) => s,
                Entry::Signed(n) => n.to_string(),
                Entry::Unsigned(n) => n.to_string(),
            })
        });
        ZMat2::from_strings(&rows).map_err(serde::de::Error::custom)
    }
}

/// Serialized as rows of canonical residues; the modulus is implied by the
/// surrounding context.
impl Serialize for ModMat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let [a, b, c, d] = self.e;
        [[a, b], [c, d]].serialize(s)
    }
}

/// An integer of unbounded size, serialized as a decimal string (plain JSON
/// integers are accepted on input).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decimal(pub BigInt);

impl Serialize for Decimal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            Text(String),
            Signed(i64),
            Unsigned(u64),
        }
        match Form::deserialize(d)? {
            Form::Text(s) => s
                .parse()
                .map(Decimal)
                .map_err(|_| serde::de::Error::custom(format!("not a decimal integer: {s:?}"))),
            Form::Signed(n) => Ok(Decimal(n.into())),
            Form::Unsigned(n) => Ok(Decimal(n.into())),
        }
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A 2×2 matrix over ℤ/m with canonical entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMat2 {
    e: [u32; 4],
    m: u32,
}

impl ModMat2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64, m: u64) -> Result<Self> {
        let m = check_modulus(m as i128)?;
        Ok(ModMat2 {
            e: [
                reduce_i64(a, m),
                reduce_i64(b, m),
                reduce_i64(c, m),
                reduce_i64(d, m),
            ],
            m,
        })
    }

    pub fn identity(m: u64) -> Result<Self> {
        ModMat2::new(1, 0, 0, 1, m)
    }

    pub fn zero(m: u64) -> Result<Self> {
        ModMat2::new(0, 0, 0, 0, m)
    }

    /// Elementary matrix with a single 1 at position `idx` (row-major).
    pub fn elementary(idx: usize, m: u64) -> Result<Self> {
        let mut x = ModMat2::zero(m)?;
        x.e[idx] = 1;
        Ok(x)
    }

    pub fn entries(&self) -> [u32; 4] {
        self.e
    }

    pub fn modulus(&self) -> u64 {
        self.m as u64
    }

    pub fn det(&self) -> Residue {
        let m = self.m as u64;
        let ad = self.e[0] as u64 * self.e[3] as u64 % m;
        let bc = self.e[1] as u64 * self.e[2] as u64 % m;
        Residue {
            value: (ad + m - bc) % m,
            modulus: m,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.e == [1 % self.m, 0, 0, 1 % self.m]
    }

    pub fn is_zero(&self) -> bool {
        self.e == [0; 4]
    }

    pub fn try_mul(&self, y: &ModMat2) -> Result<ModMat2> {
        if self.m != y.m {
            return Err(Error::ModulusMismatch(self.m as u64, y.m as u64));
        }
        Ok(self.mul_same(y))
    }

    pub fn try_add(&self, y: &ModMat2) -> Result<ModMat2> {
        if self.m != y.m {
            return Err(Error::ModulusMismatch(self.m as u64, y.m as u64));
        }
        Ok(self.add_same(y))
    }

    /// Product assuming equal moduli.
    #[inline]
    pub(crate) fn mul_same(&self, y: &ModMat2) -> ModMat2 {
        debug_assert_eq!(self.m, y.m);
        let m = self.m as u64;
        let [a, b, c, d] = self.e.map(u64::from);
        let [p, q, r, s] = y.e.map(u64::from);
        ModMat2 {
            e: [
                ((a * p + b * r) % m) as u32,
                ((a * q + b * s) % m) as u32,
                ((c * p + d * r) % m) as u32,
                ((c * q + d * s) % m) as u32,
            ],
            m: self.m,
        }
    }

    #[inline]
    pub(crate) fn add_same(&self, y: &ModMat2) -> ModMat2 {
        debug_assert_eq!(self.m, y.m);
        let m = self.m as u64;
        let mut e = [0u32; 4];
        for i in 0..4 {
            e[i] = ((self.e[i] as u64 + y.e[i] as u64) % m) as u32;
        }
        ModMat2 { e, m: self.m }
    }

    pub fn neg(&self) -> ModMat2 {
        ModMat2 {
            e: self.e.map(|x| (self.m - x) % self.m),
            m: self.m,
        }
    }

    pub fn sub(&self, y: &ModMat2) -> Result<ModMat2> {
        self.try_add(&y.neg())
    }

    /// Inverse of a determinant-one matrix (the adjugate).
    pub fn inverse_unimodular(&self) -> Result<ModMat2> {
        let det = self.det();
        if !det.is_one() {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        Ok(self.adjugate())
    }

    #[inline]
    pub(crate) fn adjugate(&self) -> ModMat2 {
        let m = self.m;
        let [a, b, c, d] = self.e;
        ModMat2 {
            e: [d, (m - b) % m, (m - c) % m, a],
            m,
        }
    }

    /// The smaller of `x` and `-x`; identifies a matrix with its negative.
    pub fn projective(&self) -> ModMat2 {
        let n = self.neg();
        if n.e < self.e {
            n
        } else {
            *self
        }
    }

    pub fn is_plus_minus_identity(&self) -> bool {
        self.is_identity() || self.neg().is_identity()
    }

    /// Reduce further to a modulus dividing this one.
    pub fn reduce_to(&self, m: u64) -> Result<ModMat2> {
        if m < 2 || self.m as u64 % m != 0 {
            return Err(Error::Precondition(format!(
                "modulus {m} does not divide {}",
                self.m
            )));
        }
        Ok(ModMat2 {
            e: self.e.map(|x| (x as u64 % m) as u32),
            m: m as u32,
        })
    }

    /// The canonical lift with entries in `[0, m)`.
    pub fn lift(&self) -> ZMat2 {
        ZMat2::new(self.e[0], self.e[1], self.e[2], self.e[3])
    }
}

impl Mul for ModMat2 {
    type Output = ModMat2;

    /// Panics on modulus mismatch; use [`ModMat2::try_mul`] for a checked product.
    fn mul(self, y: ModMat2) -> ModMat2 {
        self.try_mul(&y).expect("modulus mismatch")
    }
}

impl fmt::Display for ModMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]] mod {}",
            self.e[0], self.e[1], self.e[2], self.e[3], self.m
        )
    }
}

/// A matrix in either ambient or quotient mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mat2 {
    Ambient(ZMat2),
    Quotient(ModMat2),
}

/// A determinant in the entry ring of the matrix it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Integer(BigInt),
    Residue(Residue),
}

pub fn mat2_mul(x: &Mat2, y: &Mat2) -> Result<Mat2> {
    match (x, y) {
        (Mat2::Ambient(x), Mat2::Ambient(y)) => Ok(Mat2::Ambient(x * y)),
        (Mat2::Quotient(x), Mat2::Quotient(y)) => Ok(Mat2::Quotient(x.try_mul(y)?)),
        _ => Err(Error::ModeMismatch),
    }
}

pub fn mat2_det(x: &Mat2) -> Scalar {
    match x {
        Mat2::Ambient(x) => Scalar::Integer(x.det()),
        Mat2::Quotient(x) => Scalar::Residue(x.det()),
    }
}

pub fn reduce(x: &ZMat2, m: u64) -> Result<ModMat2> {
    x.reduce(m)
}
