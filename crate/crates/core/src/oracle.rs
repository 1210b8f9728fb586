//! Slow reference implementations for checking the engine.
//!
//! [`greedy_reference`] is a second, literal reading of the greedy loop that
//! shares nothing with [`crate::engine`] beyond the data types. The
//! exhaustive search gives the true optimum of the pairwise objective on
//! small instances.

use thiserror::Error;

use crate::engine::{ClusterResult, EngineError, MatrixRow};
use crate::metric::Metric;
use crate::tree::{Node, PreferenceTree};

pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("no class has any node")]
    EmptyTree,
    #[error("{0} combinations exceed the exhaustive limit")]
    TooLarge(u128),
}

/// Sum of distances over all unordered pairs of a selection.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ObjectiveValue(pub f64);

pub fn pairwise_objective<M: Metric>(selection: &[Node], metric: &M) -> ObjectiveValue {
    let mut total = 0.0;
    for i in 0..selection.len() {
        for j in (i + 1)..selection.len() {
            total += metric.distance(&selection[i], &selection[j]);
        }
    }
    ObjectiveValue(total)
}

pub fn greedy_reference<M: Metric>(tree: &PreferenceTree, metric: &M) -> Result<ClusterResult, EngineError> {
    let full_tree = tree.classes();
    let mut s: Vec<Node> = Vec::new();
    let mut s_classes: Vec<String> = Vec::new();
    let mut rows: Vec<MatrixRow> = Vec::new();
    let mut skipped: Vec<String> = Vec::new();
    let mut evals: u64 = 0;
    let mut first_iteration = true;

    for this_class in 0..full_tree.len() {
        let class_list = &full_tree[this_class];
        if class_list.nodes.is_empty() {
            skipped.push(class_list.name.clone());
            continue;
        }
        let mut distance_list: Vec<f64> = Vec::new();
        if first_iteration {
            for candidate in &class_list.nodes {
                let mut distance = 0.0;
                #[allow(clippy::needless_range_loop)] // kept index-based on purpose
                for item_class in 0..full_tree.len() {
                    if item_class == this_class {
                        continue;
                    }
                    for item in &full_tree[item_class].nodes {
                        distance += metric.distance(candidate, item);
                        evals += 1;
                    }
                }
                distance_list.push(distance);
            }
            first_iteration = false;
        } else {
            for candidate in &class_list.nodes {
                let mut distance = 0.0;
                for item in &s {
                    distance += metric.distance(candidate, item);
                    evals += 1;
                }
                distance_list.push(distance);
            }
        }

        let mut min_at = 0;
        let mut min_value = f64::INFINITY;
        let mut total = 0.0;
        for (i, &d) in distance_list.iter().enumerate() {
            total += d;
            if d < min_value {
                min_value = d;
                min_at = i;
            }
        }
        let chosen = class_list.nodes[min_at].clone();
        s.push(chosen.clone());
        s_classes.push(class_list.name.clone());
        rows.push(MatrixRow {
            step: s.len(),
            node: chosen,
            class_name: class_list.name.clone(),
            s_snapshot: s_classes.clone(),
            d: min_value,
            t: total,
            k: if min_value > 0.0 { Some(total / min_value) } else { None },
        });
    }

    if s.is_empty() {
        return Err(EngineError::EmptyTree);
    }
    Ok(ClusterResult { selected: s, matrix: rows, skipped_classes: skipped, hull: None, distance_evals: evals })
}

/// Best one-node-per-class selection under [`pairwise_objective`].
///
/// Empty classes are ignored. Combinations are enumerated in lexicographic
/// index order and the first minimum wins.
pub fn exhaustive_min_pairwise<M: Metric>(
    tree: &PreferenceTree,
    metric: &M,
) -> Result<(Vec<Node>, ObjectiveValue), OracleError> {
    let classes: Vec<&[Node]> =
        tree.classes().iter().filter(|c| !c.nodes.is_empty()).map(|c| c.nodes.as_slice()).collect();
    if classes.is_empty() {
        return Err(OracleError::EmptyTree);
    }
    let combos = classes.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    if combos > EXHAUSTIVE_LIMIT {
        return Err(OracleError::TooLarge(combos));
    }

    let mut odometer = vec![0usize; classes.len()];
    let mut best: Option<(Vec<Node>, ObjectiveValue)> = None;
    loop {
        let pick: Vec<Node> = odometer.iter().zip(&classes).map(|(&i, c)| c[i].clone()).collect();
        let value = pairwise_objective(&pick, metric);
        if best.as_ref().is_none_or(|(_, b)| value.0 < b.0) {
            best = Some((pick, value));
        }

        let mut pos = classes.len();
        loop {
            if pos == 0 {
                return Ok(best.expect("at least one combination"));
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < classes[pos].len() {
                break;
            }
            odometer[pos] = 0;
        }
    }
}
