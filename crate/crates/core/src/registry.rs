//! Name-keyed registries for interchangeable strategies.
//!
//! Each strategy family (formation filters, double-coset membership tests,
//! congruence-gap witness searches) is a trait object built by a factory
//! from a JSON parameter value, so tower files and command-line flags can
//! select an implementation by name.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::error::{Error, Result};

pub type Factory<T> = fn(&Value) -> Result<Box<T>>;

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    inner: BTreeMap<&'static str, Factory<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            inner: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: Factory<T>) {
        self.inner.insert(name, factory);
    }

    pub fn build(&self, name: &str, params: &Value) -> Result<Box<T>> {
        let factory = self.inner.get(name).ok_or_else(|| Error::Unknown {
            kind: self.kind,
            name: name.to_string(),
        })?;
        factory(params)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.inner.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Shape {
        fn sides(&self) -> u32;
    }
    struct Square;
    impl Shape for Square {
        fn sides(&self) -> u32 {
            4
        }
    }

    #[test]
    fn build_by_name() {
        let mut r: Registry<dyn Shape> = Registry::new("shape");
        r.register("square", |_| Ok(Box::new(Square)));
        assert_eq!(r.build("square", &Value::Null).unwrap().sides(), 4);
        let err = r.build("circle", &Value::Null).err().unwrap();
        assert_eq!(err.to_string(), "unknown shape `circle`");
        assert_eq!(r.names(), vec!["square"]);
    }
}
