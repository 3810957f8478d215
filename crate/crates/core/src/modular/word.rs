//! Words in the generators `S = [[0,-1],[1,0]]` and `T = [[1,1],[0,1]]`.
//!
//! A word is kept as a list of syllables `S^e` / `T^e` with nonzero exponents
//! and no two adjacent syllables on the same generator, which is exactly a
//! freely reduced word over `{S, S⁻¹, T, T⁻¹}` in run-length form. Euclidean
//! rewriting produces large `T` exponents, so the compressed form matters.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{ModMat2, ZMat2};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    S,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub gen: Gen,
    pub exp: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModularWord {
    syllables: Vec<Syllable>,
}

impl ModularWord {
    pub fn empty() -> Self {
        ModularWord::default()
    }

    pub fn s() -> Self {
        ModularWord::power(Gen::S, 1)
    }

    pub fn t() -> Self {
        ModularWord::power(Gen::T, 1)
    }

    pub fn power(gen: Gen, exp: i64) -> Self {
        let mut w = ModularWord::empty();
        w.push(gen, exp);
        w
    }

    /// `U = [[1,0],[1,1]] = S⁻¹T⁻¹S`.
    pub fn u() -> Self {
        let mut w = ModularWord::empty();
        w.push(Gen::S, -1);
        w.push(Gen::T, -1);
        w.push(Gen::S, 1);
        w
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters over `{S, S⁻¹, T, T⁻¹}`.
    pub fn letter_count(&self) -> u64 {
        self.syllables.iter().map(|s| s.exp.unsigned_abs()).sum()
    }

    /// Append `gen^exp`, merging with the last syllable when possible.
    pub fn push(&mut self, gen: Gen, exp: i64) {
        if exp == 0 {
            return;
        }
        if let Some(last) = self.syllables.last_mut() {
            if last.gen == gen {
                last.exp += exp;
                if last.exp == 0 {
                    self.syllables.pop();
                }
                return;
            }
        }
        self.syllables.push(Syllable { gen, exp });
    }

    pub fn concat(&self, other: &ModularWord) -> ModularWord {
        let mut w = self.clone();
        for s in &other.syllables {
            w.push(s.gen, s.exp);
        }
        w
    }

    pub fn inverse(&self) -> ModularWord {
        let mut w = ModularWord::empty();
        for s in self.syllables.iter().rev() {
            w.push(s.gen, -s.exp);
        }
        w
    }

    pub fn pow(&self, k: u32) -> ModularWord {
        let mut w = ModularWord::empty();
        for _ in 0..k {
            w = w.concat(self);
        }
        w
    }

    /// A uniformly random word of `len` letters (before free reduction).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> ModularWord {
        let mut w = ModularWord::empty();
        for _ in 0..len {
            let gen = if rng.gen_bool(0.5) { Gen::S } else { Gen::T };
            let exp = if rng.gen_bool(0.5) { 1 } else { -1 };
            w.push(gen, exp);
        }
        w
    }
}

fn s_power(e: i64) -> ZMat2 {
    match e.rem_euclid(4) {
        0 => ZMat2::new(1, 0, 0, 1),
        1 => ZMat2::new(0, -1, 1, 0),
        2 => ZMat2::new(-1, 0, 0, -1),
        _ => ZMat2::new(0, 1, -1, 0),
    }
}

/// The matrix a word evaluates to.
pub fn word_eval(w: &ModularWord) -> ZMat2 {
    let mut acc = ZMat2::identity();
    for s in w.syllables() {
        let g = match s.gen {
            Gen::S => s_power(s.exp),
            Gen::T => ZMat2::new(1, s.exp, 0, 1),
        };
        acc = &acc * &g;
    }
    acc
}

/// The reduction of `word_eval(w)` modulo `m`, computed without big integers.
pub fn word_eval_mod(w: &ModularWord, m: u64) -> Result<ModMat2> {
    let mut acc = ModMat2::identity(m)?;
    for s in w.syllables() {
        let g = match s.gen {
            Gen::S => match s.exp.rem_euclid(4) {
                0 => ModMat2::new(1, 0, 0, 1, m)?,
                1 => ModMat2::new(0, -1, 1, 0, m)?,
                2 => ModMat2::new(-1, 0, 0, -1, m)?,
                _ => ModMat2::new(0, 1, -1, 0, m)?,
            },
            Gen::T => ModMat2::new(1, s.exp.rem_euclid(m as i64), 0, 1, m)?,
        };
        acc = acc.mul_same(&g);
    }
    Ok(acc)
}

fn small(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Invalid(format!("exponent {x} does not fit in 64 bits")))
}

/// Rewrite a determinant-one matrix as a word in `S` and `T`.
///
/// Euclidean reduction on the first column: left multiplication by `T^{-q}`
/// reduces `a` modulo `c`, left multiplication by `S` swaps the rows. What
/// remains is `±T^k`, and `-I` is written as `S²`.
pub fn matrix_to_word(x: &ZMat2) -> Result<ModularWord> {
    let det = x.det();
    if !det.is_one() {
        return Err(Error::NotUnimodular(det.to_string()));
    }
    let [a, b, c, d] = x.entries().clone();
    let (mut a, mut b, mut c, mut d) = (a, b, c, d);
    // prefix collects the inverses of the left multipliers, in order
    let mut prefix = ModularWord::empty();
    while !c.is_zero() {
        let q = a.div_floor(&c);
        if !q.is_zero() {
            // T^{-q} · [[a,b],[c,d]] = [[a - qc, b - qd], [c, d]]
            a -= &q * &c;
            b -= &q * &d;
            prefix.push(Gen::T, small(&q)?);
        }
        // S · [[a,b],[c,d]] = [[-c,-d],[a,b]]
        let (na, nb, nc, nd) = (-&c, -&d, a, b);
        a = na;
        b = nb;
        c = nc;
        d = nd;
        prefix.push(Gen::S, -1);
    }
    // now [[a, b], [0, d]] with a = d = ±1
    let mut w = prefix;
    if a.is_one() {
        w.push(Gen::T, small(&b)?);
    } else {
        debug_assert!((-&a).is_one() && (-&d).is_one());
        // -T^k with k = -b
        w.push(Gen::S, 2);
        w.push(Gen::T, small(&-b)?);
    }
    Ok(w)
}

impl fmt::Display for ModularWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let g = match s.gen {
                Gen::S => "S",
                Gen::T => "T",
            };
            if s.exp == 1 {
                f.write_str(g)?;
            } else {
                write!(f, "{g}^{}", s.exp)?;
            }
        }
        Ok(())
    }
}

impl FromStr for ModularWord {
    type Err = Error;

    /// Parses the `Display` form, e.g. `S T^3 S^-1`; `1` or an empty string is
    /// the empty word.
    fn from_str(text: &str) -> Result<Self> {
        let mut w = ModularWord::empty();
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(w);
        }
        for token in text.split_whitespace() {
            let (g, e) = match token.split_once('^') {
                Some((g, e)) => (
                    g,
                    e.parse::<i64>()
                        .map_err(|_| Error::Invalid(format!("bad exponent in {token:?}")))?,
                ),
                None => (token, 1),
            };
            let gen = match g {
                "S" => Gen::S,
                "T" => Gen::T,
                _ => return Err(Error::Invalid(format!("unknown generator in {token:?}"))),
            };
            w.push(gen, e);
        }
        Ok(w)
    }
}

impl Serialize for ModularWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ModularWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // the empty word is written "1", which may arrive as a number
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            Text(String),
            One(u64),
        }
        match Form::deserialize(d)? {
            Form::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Form::One(1) => Ok(ModularWord::empty()),
            Form::One(n) => Err(serde::de::Error::custom(format!("{n} is not a word"))),
        }
    }
}

/// Is `x` congruent to `±I` modulo `m`?
pub fn is_pm_identity_mod(x: &ZMat2, m: u64) -> Result<bool> {
    Ok(x.reduce(m)?.is_plus_minus_identity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn evaluation_examples() {
        assert!(word_eval(&ModularWord::empty()).is_identity());
        let t3 = ModularWord::t().pow(3);
        assert_eq!(word_eval(&t3), ZMat2::new(1, 3, 0, 1));
        assert_eq!(
            word_eval(&ModularWord::s().pow(2)),
            ZMat2::new(-1, 0, 0, -1)
        );
        assert_eq!(word_eval(&ModularWord::u()), ZMat2::new(1, 0, 1, 1));
    }

    #[test]
    fn free_reduction() {
        let w = ModularWord::t().concat(&ModularWord::t().inverse());
        assert!(w.is_empty());
        let w: ModularWord = "S T T^-1 S^-1".parse().unwrap();
        assert!(w.is_empty());
        assert_eq!(ModularWord::t().pow(3).syllables().len(), 1);
    }

    #[test]
    fn rewriting_examples() {
        assert!(matrix_to_word(&ZMat2::identity()).unwrap().is_empty());
        let w = matrix_to_word(&ZMat2::new(1, 3, 0, 1)).unwrap();
        assert_eq!(w.to_string(), "T^3");
        let minus = ZMat2::new(-1, 0, 0, -1);
        let w = matrix_to_word(&minus).unwrap();
        assert_eq!(word_eval(&w), minus);
        assert_eq!(w.to_string(), "S^2");
        assert!(matches!(
            matrix_to_word(&ZMat2::new(2, 0, 0, 1)),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn round_trip_on_random_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let len = rng.gen_range(0..=30);
            let x = word_eval(&ModularWord::random(&mut rng, len));
            let w = matrix_to_word(&x).unwrap();
            assert_eq!(word_eval(&w), x);
        }
    }

    #[test]
    fn modular_evaluation_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let w = ModularWord::random(&mut rng, 25);
            for m in [2u64, 3, 7, 12, 24] {
                assert_eq!(
                    word_eval_mod(&w, m).unwrap(),
                    word_eval(&w).reduce(m).unwrap()
                );
            }
        }
    }

    #[test]
    fn display_round_trip() {
        let w: ModularWord = "S^-1 T^12 S T^-3".parse().unwrap();
        assert_eq!(w.to_string(), "S^-1 T^12 S T^-3");
        assert_eq!(w.to_string().parse::<ModularWord>().unwrap(), w);
        assert_eq!(w.letter_count(), 17);
        assert!("X".parse::<ModularWord>().is_err());
    }
}
