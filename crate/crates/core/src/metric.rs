//! Distance functions the engine can be run with.

use std::collections::HashMap;

use crate::geo::haversine_km;
use crate::tree::Node;

/// A symmetric, non-negative distance between nodes, zero on identical nodes.
///
/// The engine only ever asks for distances between nodes of different
/// classes, so implementations need not define intra-class values.
pub trait Metric {
    fn distance(&self, a: &Node, b: &Node) -> f64;
}

impl<M: Metric + ?Sized> Metric for &M {
    fn distance(&self, a: &Node, b: &Node) -> f64 {
        (**self).distance(a, b)
    }
}

/// Great-circle distance between node coordinates, in kilometers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Haversine;

impl Metric for Haversine {
    fn distance(&self, a: &Node, b: &Node) -> f64 {
        haversine_km(a.point, b.point).get()
    }
}

/// Wraps a closure as a metric.
pub struct FnMetric<F>(pub F);

impl<F: Fn(&Node, &Node) -> f64> Metric for FnMetric<F> {
    fn distance(&self, a: &Node, b: &Node) -> f64 {
        (self.0)(a, b)
    }
}

/// Multiplies another metric by a constant factor.
pub struct Scaled<M> {
    pub inner: M,
    pub factor: f64,
}

impl<M: Metric> Metric for Scaled<M> {
    fn distance(&self, a: &Node, b: &Node) -> f64 {
        self.factor * self.inner.distance(a, b)
    }
}

/// Explicit edge weights keyed by node name, for abstract graphs.
///
/// Lookups are symmetric. A node's distance to itself is zero. Asking for an
/// undefined edge panics, which flags fixtures that forgot an edge the
/// algorithm actually consumes.
#[derive(Debug, Clone, Default)]
pub struct EdgeTable {
    edges: HashMap<(String, String), f64>,
}

impl EdgeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_edges<'a>(edges: impl IntoIterator<Item = (&'a str, &'a str, f64)>) -> Self {
        let mut table = Self::new();
        for (a, b, d) in edges {
            table.set(a, b, d);
        }
        table
    }

    pub fn set(&mut self, a: &str, b: &str, d: f64) {
        self.edges.insert(Self::key(a, b), d);
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        if a == b {
            return Some(0.0);
        }
        self.edges.get(&Self::key(a, b)).copied()
    }

    fn key(a: &str, b: &str) -> (String, String) {
        if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        }
    }
}

impl Metric for EdgeTable {
    fn distance(&self, a: &Node, b: &Node) -> f64 {
        self.get(&a.name, &b.name)
            .unwrap_or_else(|| panic!("no edge between {:?} and {:?}", a.name, b.name))
    }
}
