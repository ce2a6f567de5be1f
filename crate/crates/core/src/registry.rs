//! Name-keyed registries of interchangeable strategies.
//!
//! Each family of algorithms (Jacobi-sum evaluators, projective point
//! counters, special-fiber enumerators, verification suites) is a trait; the
//! concrete implementations are registered under a short name and selected at
//! runtime, usually from a CLI flag.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

type Factory<T> = Box<dyn Fn() -> Box<T> + Send + Sync>;

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Factory<T>>,
    order: Vec<&'static str>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
            order: Vec::new(),
        }
    }

    /// Registers a constructor under `name`, replacing any previous entry.
    pub fn register<F>(&mut self, name: &'static str, factory: F) -> &mut Self
    where
        F: Fn() -> Box<T> + Send + Sync + 'static,
    {
        if self.entries.insert(name, Box::new(factory)).is_none() {
            self.order.push(name);
        }
        self
    }

    pub fn get(&self, name: &str) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some(factory) => Ok(factory()),
            None => Err(Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.order.join(", "),
            }),
        }
    }

    /// Names in registration order.
    pub fn names(&self) -> &[&'static str] {
        &self.order
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("names", &self.order)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter {
        fn greet(&self) -> String;
    }
    struct Hello;
    impl Greeter for Hello {
        fn greet(&self) -> String {
            "hello".into()
        }
    }

    #[test]
    fn lookup_and_unknown() {
        let mut reg: Registry<dyn Greeter> = Registry::new("greeter");
        reg.register("hello", || Box::new(Hello));
        assert_eq!(reg.get("hello").unwrap().greet(), "hello");
        assert_eq!(reg.names(), &["hello"]);
        match reg.get("bye") {
            Err(Error::UnknownStrategy { available, .. }) => assert_eq!(available, "hello"),
            other => panic!("unexpected {:?}", other.map(|g| g.greet())),
        }
    }
}
