use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the environment variable that overrides default budgets.
pub const BUDGET_ENV: &str = "COSETOPE_BUDGET";

/// Resource limits. Exceeding one is an error naming the limit, never a stall.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest subgroup closure that may be enumerated.
    pub closure: u64,
    /// Largest `|U|·|V|` for an explicit set product.
    pub product: u64,
    /// Candidates examined by a congruence-gap witness search.
    pub witness: u64,
    /// Largest degree accepted by low-index enumeration.
    pub degree: u64,
    /// Largest modulus for which a quotient context is built.
    pub modulus: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            closure: 5_000_000,
            product: 10_000_000,
            witness: 100_000,
            degree: 12,
            modulus: 4096,
        }
    }
}

impl Budget {
    /// Parse an override such as `closure=100000,product=2000000`. A bare
    /// integer sets the closure cap.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(self);
        }
        if let Ok(n) = spec.parse::<u64>() {
            self.closure = positive("closure", n)?;
            return Ok(self);
        }
        for part in spec.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("budget entry {part:?} is not key=value")))?;
            let n: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("budget value {value:?} is not an integer")))?;
            let key = key.trim();
            let slot = match key {
                "closure" => &mut self.closure,
                "product" => &mut self.product,
                "witness" => &mut self.witness,
                "degree" => &mut self.degree,
                "modulus" => &mut self.modulus,
                _ => {
                    return Err(Error::Unknown {
                        kind: "budget key",
                        name: key.to_string(),
                    })
                }
            };
            *slot = positive(key, n)?;
        }
        Ok(self)
    }

    /// Defaults, overridden by `COSETOPE_BUDGET` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => Budget::default().with_overrides(&v),
            Err(_) => Ok(Budget::default()),
        }
    }

    pub fn check_closure(&self, size: usize) -> Result<()> {
        if size as u64 > self.closure {
            return Err(Error::budget("subgroup closure", self.closure));
        }
        Ok(())
    }

    pub fn check_product(&self, pairs: u128) -> Result<()> {
        if pairs > self.product as u128 {
            return Err(Error::budget("set product", self.product));
        }
        Ok(())
    }
}

fn positive(key: &str, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Invalid(format!("budget {key} must be positive")));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let b = Budget::default()
            .with_overrides("closure=10, witness=7")
            .unwrap();
        assert_eq!(b.closure, 10);
        assert_eq!(b.witness, 7);
        assert_eq!(b.product, 10_000_000);
        assert_eq!(Budget::default().with_overrides("99").unwrap().closure, 99);
        assert!(Budget::default().with_overrides("closure=0").is_err());
        assert!(Budget::default().with_overrides("speed=3").is_err());
    }

    #[test]
    fn checks_name_the_budget() {
        let b = Budget {
            closure: 5,
            ..Budget::default()
        };
        let err = b.check_closure(6).unwrap_err();
        assert!(err.is_budget());
        assert!(err.to_string().contains("subgroup closure"));
    }
}
