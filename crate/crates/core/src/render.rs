//! GeoJSON and standalone HTML maps of a clustering result.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::TileTemplates;
use crate::engine::ClusterResult;
use crate::geo::GeoPoint;
use crate::provider::MapStyle;
use crate::tree::PreferenceTree;

/// Class colors, assigned by class index.
pub const PALETTE: [&str; 30] = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6", "#bfef45", "#fabed4", "#469990",
    "#dcbeff", "#9a6324", "#800000", "#aaffc3", "#808000", "#ffd8b1", "#000075", "#a9a9a9", "#ffe119", "#1b9e77",
    "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666", "#8dd3c7", "#fb8072", "#80b1d3",
];

pub fn class_color(class_id: usize) -> &'static str {
    PALETTE[class_id % PALETTE.len()]
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("selected node {name:?} (class {class_id}, index {index}) is not in the tree")]
    InconsistentInput { name: String, class_id: usize, index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    #[serde(rename = "class")]
    pub class_name: String,
    pub color: String,
    pub count: usize,
    #[serde(rename = "selected")]
    pub selected_name: Option<String>,
}

pub fn legend(tree: &PreferenceTree, result: &ClusterResult) -> Vec<LegendEntry> {
    tree.classes()
        .iter()
        .enumerate()
        .map(|(id, class)| LegendEntry {
            class_name: class.name.clone(),
            color: class_color(id).to_string(),
            count: class.nodes.len(),
            selected_name: result.selected.iter().find(|n| n.class_id == id).map(|n| n.name.clone()),
        })
        .collect()
}

fn check_consistent(result: &ClusterResult, tree: &PreferenceTree) -> Result<(), RenderError> {
    for node in &result.selected {
        if !tree.contains(node) {
            return Err(RenderError::InconsistentInput {
                name: node.name.clone(),
                class_id: node.class_id,
                index: node.index,
            });
        }
    }
    Ok(())
}

fn lon_lat(p: &GeoPoint) -> Value {
    json!([p.lon(), p.lat()])
}

/// FeatureCollection: one Point per node (class order, then node order),
/// then the boundary Polygon when there is one.
pub fn geojson_value(result: &ClusterResult, tree: &PreferenceTree) -> Result<Value, RenderError> {
    check_consistent(result, tree)?;
    let mut features = Vec::with_capacity(tree.node_count() + 1);
    for (class_id, class) in tree.classes().iter().enumerate() {
        let chosen = result.row_for_class(class_id);
        for node in &class.nodes {
            let mut props = Map::new();
            props.insert("class".into(), json!(class.name));
            props.insert("name".into(), json!(node.name));
            props.insert("color".into(), json!(class_color(class_id)));
            let row = chosen.filter(|r| r.node.index == node.index);
            props.insert("selected".into(), json!(row.is_some()));
            if let Some(row) = row {
                props.insert("step".into(), json!(row.step));
                props.insert("D".into(), json!(row.d));
                props.insert("T".into(), json!(row.t));
                if let Some(k) = row.k {
                    props.insert("k".into(), json!(k));
                }
            }
            features.push(json!({
                "type": "Feature",
                "geometry": { "type": "Point", "coordinates": lon_lat(&node.point) },
                "properties": Value::Object(props),
            }));
        }
    }
    if let Some(ring) = &result.hull {
        features.push(json!({
            "type": "Feature",
            "geometry": { "type": "Polygon", "coordinates": [ring.iter().map(lon_lat).collect::<Vec<_>>()] },
            "properties": { "kind": "boundary" },
        }));
    }
    Ok(json!({ "type": "FeatureCollection", "features": features }))
}

pub fn to_geojson(result: &ClusterResult, tree: &PreferenceTree) -> Result<String, RenderError> {
    Ok(serde_json::to_string_pretty(&geojson_value(result, tree)?).expect("values are serializable"))
}

fn escape_html(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// JSON that is safe to drop inside a `<script>` element.
fn script_json(v: &Value) -> String {
    serde_json::to_string(v).expect("values are serializable").replace("</", "<\\/")
}

fn attribution(style: MapStyle) -> &'static str {
    match style {
        MapStyle::OpenStreetMap => "&copy; OpenStreetMap contributors",
        MapStyle::Terrain => "Map tiles by Stamen Design / Stadia Maps, data &copy; OpenStreetMap contributors",
    }
}

fn bounds(tree: &PreferenceTree) -> Option<[[f64; 2]; 2]> {
    let mut it = tree.nodes().map(|n| n.point);
    let first = it.next()?;
    let init = [[first.lat(), first.lon()], [first.lat(), first.lon()]];
    Some(it.fold(init, |[[s, w], [n, e]], p| [[s.min(p.lat()), w.min(p.lon())], [n.max(p.lat()), e.max(p.lon())]]))
}

const HTML_TEMPLATE: &str = include_str!("map_template.html");

const HULL_LAYER: &str = r##"
  L.geoJSON(data, {
    filter: function (f) { return f.geometry.type === "Polygon"; },
    style: { color: "#222222", weight: 2, dashArray: "6 4", fillColor: "#222222", fillOpacity: 0.08 }
  }).addTo(map);
"##;

/// A single-file Leaflet page with the data inlined: class-colored circle
/// markers with pop-ups, the boundary outline, and a legend panel.
pub fn render_html(
    result: &ClusterResult,
    tree: &PreferenceTree,
    style: MapStyle,
    tiles: &TileTemplates,
) -> Result<String, RenderError> {
    let data = geojson_value(result, tree)?;
    let entries = legend(tree, result);
    let legend_rows: String = entries
        .iter()
        .map(|e| {
            let pick = e.selected_name.as_deref().map(escape_html).unwrap_or_else(|| "skipped".into());
            format!(
                "      <li><span class=\"swatch\" style=\"background:{}\"></span><b>{}</b> ({}) &rarr; {}</li>\n",
                e.color,
                escape_html(&e.class_name),
                e.count,
                pick
            )
        })
        .collect();
    let bounds_js = match bounds(tree) {
        Some(b) => format!("[[{}, {}], [{}, {}]]", b[0][0], b[0][1], b[1][0], b[1][1]),
        None => "null".into(),
    };
    let title = tree.classes().iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(", ");

    Ok(HTML_TEMPLATE
        .replace("{{TITLE}}", &escape_html(&title))
        .replace("{{TILE_URL}}", &serde_json::to_string(tiles.for_style(style)).expect("string"))
        .replace("{{ATTRIBUTION}}", &serde_json::to_string(attribution(style)).expect("string"))
        .replace("{{LEGEND}}", &legend_rows)
        .replace("{{BOUNDS}}", &bounds_js)
        .replace("{{HULL_LAYER}}", if result.hull.is_some() { HULL_LAYER } else { "" })
        .replace("{{GEOJSON}}", &script_json(&data)))
}
