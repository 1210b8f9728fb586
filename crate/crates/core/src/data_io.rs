//! Tree documents (CSV and JSON) and result serialization.
//!
//! CSV columns are fixed: `class,name,lat,lon`. The JSON tree is an array of
//! `{"class": .., "nodes": [{"name": .., "lat": .., "lon": ..}]}`. Class order
//! is first-appearance order and node order is preserved.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::engine::ClusterResult;
use crate::geo::{GeoError, GeoPoint};
use crate::tree::{PreferenceTree, TreeError};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("empty file")]
    EmptyFile,
    #[error("bad header {0:?}, expected class,name,lat,lon")]
    BadHeader(String),
    #[error("row {row}: {message}")]
    BadRow { row: u64, message: String },
    #[error("row {row}: bad coordinate: {detail}")]
    BadCoordinate { row: u64, detail: String },
    #[error("malformed document at {path}: {message}")]
    Malformed { path: String, message: String },
    #[error("bad coordinate at {path}: {source}")]
    BadCoordinateAt { path: String, source: GeoError },
    #[error("malformed result document: {0}")]
    BadResult(#[from] serde_json::Error),
}

/// A parsed tree plus any non-fatal notes (e.g. merged duplicate classes).
#[derive(Debug, Clone)]
pub struct ParsedTree {
    pub tree: PreferenceTree,
    pub warnings: Vec<String>,
}

pub const CSV_HEADER: [&str; 4] = ["class", "name", "lat", "lon"];

pub fn parse_tree_csv(text: &str) -> Result<ParsedTree, DataError> {
    if text.trim().is_empty() {
        return Err(DataError::EmptyFile);
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| DataError::BadHeader(e.to_string()))?.clone();
    let header_ok = header.len() == CSV_HEADER.len()
        && header.iter().zip(CSV_HEADER).all(|(h, want)| h.trim().eq_ignore_ascii_case(want));
    if !header_ok {
        return Err(DataError::BadHeader(header.iter().collect::<Vec<_>>().join(",")));
    }

    let mut tree = PreferenceTree::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            DataError::BadRow { row, message: e.to_string() }
        })?;
        let row = record.position().map_or(0, |p| p.line());
        let (class, name) = (record[0].trim(), record[1].trim());
        let coord = |s: &str| -> Result<f64, DataError> {
            s.trim().parse::<f64>().map_err(|e| DataError::BadCoordinate { row, detail: format!("{s:?}: {e}") })
        };
        let (lat, lon) = (coord(&record[2])?, coord(&record[3])?);
        let point = GeoPoint::new(lat, lon).map_err(|e| DataError::BadCoordinate { row, detail: e.to_string() })?;
        tree.insert(class, name, point).map_err(|e| DataError::BadRow { row, message: e.to_string() })?;
        rows += 1;
    }
    if rows == 0 {
        return Err(DataError::EmptyFile);
    }
    Ok(ParsedTree { tree, warnings: Vec::new() })
}

/// Writes the tree as CSV. Empty classes have no rows and are dropped.
pub fn write_tree_csv(tree: &PreferenceTree) -> String {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for class in tree.classes() {
        for node in &class.nodes {
            writer
                .write_record([
                    class.name.as_str(),
                    node.name.as_str(),
                    &node.point.lat().to_string(),
                    &node.point.lon().to_string(),
                ])
                .expect("in-memory write");
        }
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub name: String,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub class: String,
    pub nodes: Vec<NodeEntry>,
}

/// JSON form of a tree; keeps empty classes.
pub fn tree_document(tree: &PreferenceTree) -> Vec<ClassEntry> {
    tree.classes()
        .iter()
        .map(|c| ClassEntry {
            class: c.name.clone(),
            nodes: c
                .nodes
                .iter()
                .map(|n| NodeEntry { name: n.name.clone(), lat: n.point.lat(), lon: n.point.lon() })
                .collect(),
        })
        .collect()
}

pub fn parse_tree_json(text: &str) -> Result<ParsedTree, DataError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| DataError::Malformed { path: "$".into(), message: e.to_string() })?;
    parse_tree_value(&value)
}

fn malformed(path: impl Into<String>, message: impl Into<String>) -> DataError {
    DataError::Malformed { path: path.into(), message: message.into() }
}

/// As [`parse_tree_json`], for an already-decoded value.
pub fn parse_tree_value(value: &Value) -> Result<ParsedTree, DataError> {
    let classes = value.as_array().ok_or_else(|| malformed("$", "expected an array of classes"))?;
    let mut tree = PreferenceTree::new();
    let mut warnings = Vec::new();

    for (ci, entry) in classes.iter().enumerate() {
        let path = format!("$[{ci}]");
        let obj = entry.as_object().ok_or_else(|| malformed(&path, "expected an object"))?;
        let class = obj
            .get("class")
            .and_then(Value::as_str)
            .ok_or_else(|| malformed(format!("{path}.class"), "expected a string"))?;
        let class_id = match tree.class_id(class) {
            Some(id) => {
                let msg = format!("duplicate class {class:?} at {path} merged into earlier entry");
                tracing::warn!("{msg}");
                warnings.push(msg);
                id
            }
            None => tree.add_class(class).map_err(|e| malformed(format!("{path}.class"), e.to_string()))?,
        };
        let nodes = obj
            .get("nodes")
            .and_then(Value::as_array)
            .ok_or_else(|| malformed(format!("{path}.nodes"), "expected an array"))?;

        for (ni, node) in nodes.iter().enumerate() {
            let npath = format!("{path}.nodes[{ni}]");
            let name = node
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| malformed(format!("{npath}.name"), "expected a string"))?;
            let num = |key: &str| {
                node.get(key).and_then(Value::as_f64).ok_or_else(|| malformed(format!("{npath}.{key}"), "expected a number"))
            };
            let (lat, lon) = (num("lat")?, num("lon")?);
            let point = GeoPoint::new(lat, lon).map_err(|source| DataError::BadCoordinateAt { path: npath.clone(), source })?;
            tree.push_node(class_id, name, point).map_err(|e: TreeError| malformed(format!("{npath}.name"), e.to_string()))?;
        }
    }
    if tree.is_empty() {
        return Err(DataError::EmptyFile);
    }
    Ok(ParsedTree { tree, warnings })
}

/// Pretty JSON with fields in the order
/// `selected, matrix, skipped_classes, hull, distance_evals`.
///
/// Numbers use the shortest representation that parses back to the same
/// value; `k` is omitted when absent and an absent hull is `null`.
pub fn serialize_result_json(result: &ClusterResult) -> String {
    serde_json::to_string_pretty(result).expect("result is always serializable")
}

pub fn parse_result_json(text: &str) -> Result<ClusterResult, DataError> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::jjcluster;
    use crate::example::{worked_example, worked_example_metric};
    use crate::geo::CoordField;

    #[test]
    fn csv_groups_rows_by_class() {
        let p = parse_tree_csv("class,name,lat,lon\ngym,a,1,2\ngym,b,3,4\n").unwrap();
        assert_eq!(p.tree.len(), 1);
        assert_eq!(p.tree.classes()[0].nodes.len(), 2);
    }

    #[test]
    fn csv_table_row() {
        let p = parse_tree_csv("Class,Name,LAT,lon\nrestaurant,Oasis Restaurant Park Street,22.553118,88.352491\n").unwrap();
        let node = &p.tree.classes()[0].nodes[0];
        assert_eq!(p.tree.classes()[0].name, "restaurant");
        assert_eq!(node.name, "Oasis Restaurant Park Street");
        assert_eq!((node.point.lat(), node.point.lon()), (22.553118, 88.352491));
    }

    #[test]
    fn csv_preserves_first_appearance_order() {
        let p = parse_tree_csv("class,name,lat,lon\nb,x,0,0\na,y,0,0\nb, z ,0,0\n").unwrap();
        let names: Vec<_> = p.tree.classes().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["b", "a"]);
        assert_eq!(p.tree.classes()[0].nodes[1].name, "z");
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(parse_tree_csv("class,name,lat,lon\ngym,a,95,0\n"), Err(DataError::BadCoordinate { row: 2, .. })));
        assert!(matches!(parse_tree_csv("class,name,lat,lon\ngym,a,1,0\ngym,b,x,0\n"), Err(DataError::BadCoordinate { row: 3, .. })));
        assert!(matches!(parse_tree_csv("class,name,lon,lat\n"), Err(DataError::BadHeader(_))));
        assert!(matches!(parse_tree_csv("class,name,lat\ngym,a,1\n"), Err(DataError::BadHeader(_))));
        assert!(matches!(parse_tree_csv(""), Err(DataError::EmptyFile)));
        assert!(matches!(parse_tree_csv("class,name,lat,lon\n"), Err(DataError::EmptyFile)));
        assert!(matches!(parse_tree_csv("class,name,lat,lon\ngym,,1,1\n"), Err(DataError::BadRow { row: 2, .. })));
    }

    #[test]
    fn csv_round_trips_through_writer() {
        let tree = worked_example();
        let back = parse_tree_csv(&write_tree_csv(&tree)).unwrap().tree;
        assert_eq!(back, tree);
    }

    #[test]
    fn json_singleton() {
        let p = parse_tree_json(r#"[{"class":"gym","nodes":[{"name":"a","lat":1,"lon":2}]}]"#).unwrap();
        assert_eq!(p.tree.node_count(), 1);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn json_duplicate_classes_merge_with_warning() {
        let text = r#"[
            {"class":"gym","nodes":[{"name":"a","lat":1,"lon":2}]},
            {"class":"park","nodes":[]},
            {"class":"Gym","nodes":[{"name":"b","lat":1,"lon":2}]}
        ]"#;
        let p = parse_tree_json(text).unwrap();
        assert_eq!(p.tree.len(), 2);
        assert_eq!(p.tree.classes()[0].nodes.iter().map(|n| n.name.as_str()).collect::<Vec<_>>(), ["a", "b"]);
        assert_eq!(p.tree.classes()[0].nodes[1].index, 1);
        assert_eq!(p.warnings.len(), 1);
        assert_eq!(p.tree.empty_class_names(), ["park"]);
    }

    #[test]
    fn json_errors_carry_paths() {
        match parse_tree_json(r#"[{"class":"gym","nodes":[{"name":"a","lat":1,"lon":2},{"name":"b","lat":91,"lon":0}]}]"#) {
            Err(DataError::BadCoordinateAt { path, source }) => {
                assert_eq!(path, "$[0].nodes[1]");
                assert!(matches!(source, GeoError::OutOfRange { field: CoordField::Lat, .. }));
            }
            other => panic!("{other:?}"),
        }
        match parse_tree_json(r#"[{"class":"gym","nodes":[{"name":"a","lat":"x","lon":2}]}]"#) {
            Err(DataError::Malformed { path, .. }) => assert_eq!(path, "$[0].nodes[0].lat"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_tree_json("{}"), Err(DataError::Malformed { .. })));
        assert!(matches!(parse_tree_json("not json"), Err(DataError::Malformed { .. })));
    }

    #[test]
    fn json_document_round_trip_keeps_empty_classes() {
        let mut tree = worked_example();
        tree.add_class("E").unwrap();
        let text = serde_json::to_string(&tree_document(&tree)).unwrap();
        assert_eq!(parse_tree_json(&text).unwrap().tree, tree);
    }

    #[test]
    fn result_json_layout() {
        let r = jjcluster(&worked_example(), &worked_example_metric()).unwrap();
        let text = serialize_result_json(&r);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["matrix"][0]["D"], 27.0);
        assert_eq!(v["matrix"][2]["k"], 1.0);
        let keys: Vec<&str> = ["\"selected\"", "\"matrix\"", "\"skipped_classes\"", "\"hull\"", "\"distance_evals\""]
            .into_iter()
            .collect();
        let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "field order {positions:?}");
        assert_eq!(parse_result_json(&text).unwrap(), r);
    }

    #[test]
    fn result_json_null_hull_and_missing_k() {
        let mut tree = PreferenceTree::new();
        tree.insert("a", "x", GeoPoint::new(1.0, 1.0).unwrap()).unwrap();
        let r = jjcluster(&tree, &crate::metric::Haversine).unwrap();
        let v: Value = serde_json::from_str(&serialize_result_json(&r)).unwrap();
        assert!(v["hull"].is_null());
        assert!(v["matrix"][0].get("k").is_none());
    }
}
