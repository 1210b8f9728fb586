//! The four-class abstract graph used to walk through the algorithm by hand.
//!
//! Classes A = {A1, A2}, B = {B1, B2}, C = {C1}, D = {D1}. Coordinates are
//! placeholders; distances come from [`worked_example_metric`].

use crate::geo::GeoPoint;
use crate::metric::EdgeTable;
use crate::tree::PreferenceTree;

pub fn worked_example() -> PreferenceTree {
    let mut tree = PreferenceTree::new();
    let nodes = [
        ("A", "A1", 0.00, 0.00),
        ("A", "A2", 0.01, 0.01),
        ("B", "B1", 0.02, 0.00),
        ("B", "B2", 0.02, 0.02),
        ("C", "C1", 0.00, 0.03),
        ("D", "D1", 0.03, 0.03),
    ];
    for (class, name, lat, lon) in nodes {
        let point = GeoPoint::new(lat, lon).expect("static coordinates");
        tree.insert(class, name, point).expect("static names");
    }
    tree
}

/// Edge weights for [`worked_example`].
///
/// The A-edges are the ones narrated for the first step (6+8+12+13 and
/// 9+7+6+5). B2-C1, B2-D1 and C1-D1 are solved so the later step totals come
/// out at 13 and 15. B1's edges to C1/D1 are never consumed.
pub fn worked_example_metric() -> EdgeTable {
    EdgeTable::with_edges([
        ("A1", "B1", 6.0),
        ("A1", "B2", 8.0),
        ("A1", "C1", 12.0),
        ("A1", "D1", 13.0),
        ("A2", "B1", 9.0),
        ("A2", "B2", 7.0),
        ("A2", "C1", 6.0),
        ("A2", "D1", 5.0),
        ("B2", "C1", 7.0),
        ("B2", "D1", 6.0),
        ("C1", "D1", 4.0),
        ("B1", "C1", 20.0),
        ("B1", "D1", 20.0),
    ])
}
