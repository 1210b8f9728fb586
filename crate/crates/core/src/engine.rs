//! Greedy one-node-per-class selection.
//!
//! Classes are visited in tree order. The first non-empty class scores each
//! candidate by its summed distance to every node of every other class; each
//! later class scores a candidate by its summed distance to the nodes already
//! selected. The lowest score wins, ties going to the lowest input index.
//! Empty classes are skipped.

use std::cell::Cell;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::GeoPoint;
use crate::hull::boundary_hull;
use crate::metric::Metric;
use crate::tree::{Node, PreferenceTree};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("no class has any node")]
    EmptyTree,
    #[error("class {0:?} has no nodes")]
    EmptyClass(String),
    #[error("no class with id {0}")]
    NoSuchClass(usize),
}

/// One row of the optimization matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    /// 1-based.
    pub step: usize,
    pub node: Node,
    #[serde(rename = "class")]
    pub class_name: String,
    /// Class names selected through this step, this row included.
    #[serde(rename = "list_s")]
    pub s_snapshot: Vec<String>,
    /// Score of the chosen node.
    #[serde(rename = "D")]
    pub d: f64,
    /// Sum of every candidate's score in this class.
    #[serde(rename = "T")]
    pub t: f64,
    /// `T / D`; absent when `D == 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    /// One node per non-empty class, in class order.
    pub selected: Vec<Node>,
    pub matrix: Vec<MatrixRow>,
    pub skipped_classes: Vec<String>,
    /// Closed counter-clockwise ring, or `None` with fewer than three non-collinear points.
    pub hull: Option<Vec<GeoPoint>>,
    pub distance_evals: u64,
}

impl ClusterResult {
    pub fn selected_points(&self) -> Vec<GeoPoint> {
        self.selected.iter().map(|n| n.point).collect()
    }

    pub fn row_for_class(&self, class_id: usize) -> Option<&MatrixRow> {
        self.matrix.iter().find(|r| r.node.class_id == class_id)
    }
}

struct Counting<'a, M> {
    inner: &'a M,
    evals: Cell<u64>,
}

impl<M: Metric> Metric for Counting<'_, M> {
    fn distance(&self, a: &Node, b: &Node) -> f64 {
        self.evals.set(self.evals.get() + 1);
        self.inner.distance(a, b)
    }
}

fn score_first_class<M: Metric>(tree: &PreferenceTree, class_id: usize, metric: &M) -> Vec<f64> {
    let others: Vec<&Node> = tree
        .classes()
        .iter()
        .enumerate()
        .filter(|(id, _)| *id != class_id)
        .flat_map(|(_, c)| c.nodes.iter())
        .collect();
    tree.classes()[class_id]
        .nodes
        .iter()
        .map(|cand| others.iter().map(|o| metric.distance(cand, o)).sum())
        .collect()
}

fn score_against<M: Metric>(candidates: &[Node], selected: &[Node], metric: &M) -> Vec<f64> {
    candidates
        .iter()
        .map(|cand| selected.iter().map(|s| metric.distance(cand, s)).sum())
        .collect()
}

/// Per-candidate scores for one class, in node order.
///
/// With an empty `selected_so_far` and `class_id` naming the first non-empty
/// class, each candidate is scored against all nodes of all other classes.
/// Otherwise it is scored against `selected_so_far`.
pub fn candidate_scores<M: Metric>(
    tree: &PreferenceTree,
    class_id: usize,
    selected_so_far: &[Node],
    metric: &M,
) -> Result<Vec<(Node, f64)>, EngineError> {
    let class = tree.class(class_id).ok_or(EngineError::NoSuchClass(class_id))?;
    if class.is_empty() {
        return Err(EngineError::EmptyClass(class.name.clone()));
    }
    let first_non_empty = tree.non_empty_class_ids().first().copied();
    let scores = if selected_so_far.is_empty() && first_non_empty == Some(class_id) {
        score_first_class(tree, class_id, metric)
    } else {
        score_against(&class.nodes, selected_so_far, metric)
    };
    Ok(class.nodes.iter().cloned().zip(scores).collect())
}

/// Index of the lowest score; the earliest wins on ties.
fn argmin(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s < scores[best] {
            best = i;
        }
    }
    best
}

#[cfg(debug_assertions)]
fn spot_check_metric<M: Metric>(tree: &PreferenceTree, metric: &M) {
    let nodes: Vec<&Node> = tree.nodes().collect();
    if nodes.len() < 2 {
        return;
    }
    let mut state = 0x9e37_79b9_7f4a_7c15_u64 ^ nodes.len() as u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..16 {
        let a = nodes[(next() % nodes.len() as u64) as usize];
        let b = nodes[(next() % nodes.len() as u64) as usize];
        if a.class_id == b.class_id {
            continue;
        }
        let (ab, ba) = (metric.distance(a, b), metric.distance(b, a));
        debug_assert!(ab >= 0.0, "negative distance {ab} between {:?} and {:?}", a.name, b.name);
        debug_assert!(
            (ab - ba).abs() <= 1e-9 * ab.abs().max(1.0),
            "asymmetric metric: d({:?}, {:?}) = {ab}, reverse = {ba}",
            a.name,
            b.name
        );
        let aa = metric.distance(a, a);
        debug_assert!(aa.abs() <= 1e-9, "d({:?}, itself) = {aa}", a.name);
    }
}

/// Runs the greedy selection over `tree`.
pub fn jjcluster<M: Metric>(tree: &PreferenceTree, metric: &M) -> Result<ClusterResult, EngineError> {
    let order = tree.non_empty_class_ids();
    if order.is_empty() {
        return Err(EngineError::EmptyTree);
    }
    #[cfg(debug_assertions)]
    spot_check_metric(tree, metric);

    let counting = Counting { inner: metric, evals: Cell::new(0) };
    let mut selected: Vec<Node> = Vec::with_capacity(order.len());
    let mut matrix = Vec::with_capacity(order.len());
    let mut snapshot = Vec::with_capacity(order.len());

    for (step, &class_id) in order.iter().enumerate() {
        let class = &tree.classes()[class_id];
        let scores = if step == 0 {
            score_first_class(tree, class_id, &counting)
        } else {
            score_against(&class.nodes, &selected, &counting)
        };
        let best = argmin(&scores);
        let d = scores[best];
        let t: f64 = scores.iter().sum();
        let node = class.nodes[best].clone();

        snapshot.push(class.name.clone());
        matrix.push(MatrixRow {
            step: step + 1,
            node: node.clone(),
            class_name: class.name.clone(),
            s_snapshot: snapshot.clone(),
            d,
            t,
            k: (d > 0.0).then(|| t / d),
        });
        selected.push(node);
    }

    let hull = boundary_hull(&selected.iter().map(|n| n.point).collect::<Vec<_>>());
    Ok(ClusterResult {
        selected,
        matrix,
        skipped_classes: tree.empty_class_names(),
        hull,
        distance_evals: counting.evals.get(),
    })
}

/// The matrix rows of a result, in selection order.
pub fn optimization_matrix(result: &ClusterResult) -> &[MatrixRow] {
    &result.matrix
}

/// Exact number of metric calls [`jjcluster`] makes for non-empty class sizes
/// `sizes` (in class order): `n1 * (n - n1) + sum_{i>=2} n_i * (i - 1)`.
pub fn predicted_distance_evals(sizes: &[usize]) -> u64 {
    let Some((&first, rest)) = sizes.split_first() else {
        return 0;
    };
    let total: usize = sizes.iter().sum();
    let head = (first * (total - first)) as u64;
    let tail: u64 = rest.iter().enumerate().map(|(i, &n)| (n * (i + 1)) as u64).sum();
    head + tail
}
