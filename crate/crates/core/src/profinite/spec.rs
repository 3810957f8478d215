//! Quotient specifications, formation filters and tower files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::modular::PermRep;
use crate::registry::Registry;

/// Decides which finite quotients a topology admits.
pub trait FormationFilter: Send + Sync {
    fn name(&self) -> String;
    /// `rep_image_order` is the order of the permutation image when a
    /// representation is attached.
    fn admits(&self, m: u64, rep_image_order: Option<u64>) -> bool;
}

pub struct AllFinite;

impl FormationFilter for AllFinite {
    fn name(&self) -> String {
        "all".into()
    }

    fn admits(&self, _m: u64, _rep_image_order: Option<u64>) -> bool {
        true
    }
}

/// Moduli must be powers of `p` and the permutation image a `p`-group.
pub struct ProP {
    pub p: u64,
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    if n == 0 {
        return false;
    }
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl FormationFilter for ProP {
    fn name(&self) -> String {
        format!("pro-{}", self.p)
    }

    fn admits(&self, m: u64, rep_image_order: Option<u64>) -> bool {
        is_power_of(m, self.p) && rep_image_order.is_none_or(|n| is_power_of(n, self.p))
    }
}

pub fn filter_registry() -> Registry<dyn FormationFilter> {
    let mut r: Registry<dyn FormationFilter> = Registry::new("formation filter");
    r.register("all", |_| Ok(Box::new(AllFinite)));
    r.register("pro-p", |params| {
        let p = params
            .get("p")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Invalid("pro-p filter needs an integer \"p\"".into()))?;
        if !is_prime(p) {
            return Err(Error::Invalid(format!(
                "pro-p filter needs a prime, got {p}"
            )));
        }
        Ok(Box::new(ProP { p }))
    });
    r
}

/// Serialized filter choice: `{"type": "all"}` or `{"type": "pro-p", "p": 3}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

impl Default for FilterSpec {
    fn default() -> Self {
        FilterSpec {
            kind: "all".into(),
            p: None,
        }
    }
}

impl FilterSpec {
    pub fn build(&self) -> Result<Box<dyn FormationFilter>> {
        let params = match self.p {
            Some(p) => json!({ "p": p }),
            None => Value::Null,
        };
        filter_registry().build(&self.kind, &params)
    }
}

/// A finite quotient `M₂(ℤ/m) ⋊ P` of the ambient group, where `P` is the
/// image of `SL₂(ℤ)` in `SL₂(ℤ/m)`, or in `SL₂(ℤ/m) × Sym(d)` when a
/// representation is attached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientSpec {
    pub m: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<PermRep>,
    #[serde(default)]
    pub filter: FilterSpec,
}

impl QuotientSpec {
    pub fn congruence(m: u64) -> Self {
        QuotientSpec {
            m,
            rep: None,
            filter: FilterSpec::default(),
        }
    }

    pub fn with_rep(m: u64, rep: PermRep) -> Self {
        QuotientSpec {
            m,
            rep: Some(rep),
            filter: FilterSpec::default(),
        }
    }

    /// `coarse ⊑ self`: the kernel of `self` lies in the kernel of `coarse`.
    pub fn refines(&self, coarse: &QuotientSpec) -> bool {
        if self.m % coarse.m != 0 {
            return false;
        }
        match (&coarse.rep, &self.rep) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(c), Some(f)) => f.map_onto(c).is_some(),
        }
    }

    pub fn label(&self) -> String {
        match &self.rep {
            None => format!("m={}", self.m),
            Some(r) => format!("m={} rep(degree {})", self.m, r.degree()),
        }
    }
}

/// The default congruence tower.
pub fn default_tower() -> Vec<QuotientSpec> {
    [2, 3, 4, 5, 6, 8, 12]
        .into_iter()
        .map(QuotientSpec::congruence)
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TowerEntry {
    m: u64,
    #[serde(default)]
    rep: Option<String>,
    #[serde(default)]
    filter: Option<FilterSpec>,
}

/// Read a tower file: a JSON list of `{"m", "rep"?, "filter"?}`. Rep paths
/// are resolved relative to the tower file.
pub fn load_tower(path: &Path) -> Result<Vec<QuotientSpec>> {
    let text = std::fs::read_to_string(path)?;
    let value = crate::report::destringify(serde_json::from_str(&text)?);
    let entries: Vec<TowerEntry> = serde_json::from_value(value)?;
    if entries.is_empty() {
        return Err(Error::Invalid("tower is empty".into()));
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    entries
        .into_iter()
        .map(|e| {
            if e.m < 2 {
                return Err(Error::InvalidModulus(e.m as i128));
            }
            let rep = e.rep.map(|p| PermRep::load(&base.join(p))).transpose()?;
            let filter = e.filter.unwrap_or_default();
            filter.build()?;
            Ok(QuotientSpec {
                m: e.m,
                rep,
                filter,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;

    #[test]
    fn filters() {
        let all = FilterSpec::default().build().unwrap();
        assert!(all.admits(12, Some(6)));
        let p3 = FilterSpec {
            kind: "pro-p".into(),
            p: Some(3),
        }
        .build()
        .unwrap();
        assert_eq!(p3.name(), "pro-3");
        assert!(p3.admits(27, None));
        assert!(p3.admits(9, Some(3)));
        assert!(!p3.admits(6, None));
        assert!(!p3.admits(9, Some(6)));
        let bad = FilterSpec {
            kind: "pro-p".into(),
            p: Some(4),
        };
        assert!(bad.build().is_err());
        let unknown = FilterSpec {
            kind: "soluble".into(),
            p: None,
        };
        assert!(matches!(unknown.build(), Err(Error::Unknown { .. })));
    }

    #[test]
    fn refinement_order() {
        let b = Budget::default();
        let g2 = PermRep::principal_congruence(2, &b).unwrap();
        let g4 = PermRep::principal_congruence(4, &b).unwrap();
        assert!(QuotientSpec::congruence(4).refines(&QuotientSpec::congruence(2)));
        assert!(!QuotientSpec::congruence(6).refines(&QuotientSpec::congruence(4)));
        assert!(
            QuotientSpec::with_rep(4, g4.clone()).refines(&QuotientSpec::with_rep(2, g2.clone()))
        );
        assert!(!QuotientSpec::with_rep(4, g2.clone()).refines(&QuotientSpec::with_rep(4, g4)));
        assert!(!QuotientSpec::congruence(4).refines(&QuotientSpec::with_rep(2, g2)));
    }

    #[test]
    fn tower_file() {
        let dir = std::env::temp_dir().join(format!("cosetope-tower-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let rep = PermRep::principal_congruence(2, &Budget::default()).unwrap();
        std::fs::write(dir.join("g2.json"), serde_json::to_string(&rep).unwrap()).unwrap();
        std::fs::write(
            dir.join("tower.json"),
            r#"[{"m": 2}, {"m": 4, "rep": "g2.json"}, {"m": 9, "filter": {"type": "pro-p", "p": 3}}]"#,
        )
        .unwrap();
        let tower = load_tower(&dir.join("tower.json")).unwrap();
        assert_eq!(tower.len(), 3);
        assert_eq!(tower[1].rep.as_ref(), Some(&rep));
        assert_eq!(tower[2].filter.p, Some(3));
        std::fs::write(dir.join("empty.json"), "[]").unwrap();
        assert!(load_tower(&dir.join("empty.json")).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
