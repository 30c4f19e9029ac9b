use std::collections::{BTreeMap, BTreeSet};

/// Declared nominations and their immediate parents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NominalGraph {
    parents: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NominalError {
    #[error("unknown nomination `{0}`")]
    UnknownNomination(String),
    #[error("nomination `{0}` is already declared")]
    Redeclared(String),
}

impl NominalGraph {
    pub fn new() -> NominalGraph {
        NominalGraph::default()
    }

    /// Adds a nomination. Parents must already exist, which keeps the
    /// graph acyclic.
    pub fn declare(&mut self, name: &str, parents: &[String]) -> Result<(), NominalError> {
        if self.parents.contains_key(name) {
            return Err(NominalError::Redeclared(name.to_string()));
        }
        if let Some(p) = parents.iter().find(|p| !self.parents.contains_key(*p)) {
            return Err(NominalError::UnknownNomination(p.clone()));
        }
        self.parents.insert(name.to_string(), parents.to_vec());
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.parents.contains_key(name)
    }

    pub fn parents(&self, name: &str) -> Option<&[String]> {
        self.parents.get(name).map(Vec::as_slice)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.parents.keys().map(String::as_str)
    }

    /// Reflexive, transitive closure of the parent relation.
    pub fn is_ancestor(&self, child: &str, anc: &str) -> Result<bool, NominalError> {
        for n in [child, anc] {
            if !self.contains(n) {
                return Err(NominalError::UnknownNomination(n.to_string()));
            }
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![child];
        while let Some(n) = stack.pop() {
            if n == anc {
                return Ok(true);
            }
            if seen.insert(n) {
                stack.extend(self.parents[n].iter().map(String::as_str));
            }
        }
        Ok(false)
    }
}
