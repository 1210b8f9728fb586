//! Classed candidate points: the input to the clustering engine.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::GeoPoint;

/// A named candidate point. `class_id` and `index` locate it inside its tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub class_id: usize,
    pub index: usize,
    pub name: String,
    #[serde(flatten)]
    pub point: GeoPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceClass {
    pub name: String,
    pub nodes: Vec<Node>,
}

impl PreferenceClass {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("duplicate class name {0:?}")]
    DuplicateClass(String),
    #[error("class name must not be empty")]
    EmptyClassName,
    #[error("node name must not be empty (class {0:?})")]
    EmptyNodeName(String),
    #[error("no class with id {0}")]
    NoSuchClass(usize),
}

/// Ordered classes, each holding its nodes in input order.
///
/// Class names are unique ignoring ASCII case. Node order matters: the engine
/// breaks score ties by lowest index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PreferenceTree {
    classes: Vec<PreferenceClass>,
}

impl PreferenceTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_class(&mut self, name: &str) -> Result<usize, TreeError> {
        let name = name.trim();
        if name.is_empty() {
            return Err(TreeError::EmptyClassName);
        }
        if self.class_id(name).is_some() {
            return Err(TreeError::DuplicateClass(name.to_string()));
        }
        self.classes.push(PreferenceClass { name: name.to_string(), nodes: Vec::new() });
        Ok(self.classes.len() - 1)
    }

    /// Case-insensitive lookup.
    pub fn class_id(&self, name: &str) -> Option<usize> {
        let name = name.trim();
        self.classes.iter().position(|c| c.name.eq_ignore_ascii_case(name))
    }

    /// Returns the existing class with this name, or appends a new one.
    pub fn class_id_or_insert(&mut self, name: &str) -> Result<usize, TreeError> {
        match self.class_id(name) {
            Some(id) => Ok(id),
            None => self.add_class(name),
        }
    }

    pub fn push_node(&mut self, class_id: usize, name: &str, point: GeoPoint) -> Result<&Node, TreeError> {
        let class = self.classes.get_mut(class_id).ok_or(TreeError::NoSuchClass(class_id))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(TreeError::EmptyNodeName(class.name.clone()));
        }
        let index = class.nodes.len();
        class.nodes.push(Node { class_id, index, name: name.to_string(), point });
        Ok(&class.nodes[index])
    }

    /// Appends a node to `class`, creating the class at the end if needed.
    pub fn insert(&mut self, class: &str, name: &str, point: GeoPoint) -> Result<&Node, TreeError> {
        let id = self.class_id_or_insert(class)?;
        self.push_node(id, name, point)
    }

    pub fn classes(&self) -> &[PreferenceClass] {
        &self.classes
    }

    pub fn class(&self, id: usize) -> Option<&PreferenceClass> {
        self.classes.get(id)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.classes.iter().map(|c| c.nodes.len()).sum()
    }

    pub fn non_empty_class_ids(&self) -> Vec<usize> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(i, _)| i)
            .collect()
    }

    /// Names of classes with no nodes; the engine skips these.
    pub fn empty_class_names(&self) -> Vec<String> {
        self.classes.iter().filter(|c| c.is_empty()).map(|c| c.name.clone()).collect()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.classes.iter().flat_map(|c| c.nodes.iter())
    }

    /// True if `node` appears verbatim at its recorded position.
    pub fn contains(&self, node: &Node) -> bool {
        self.classes
            .get(node.class_id)
            .and_then(|c| c.nodes.get(node.index))
            .is_some_and(|n| n == node)
    }
}
