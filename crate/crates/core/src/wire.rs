//! JSON bodies exchanged between the HTTP service and its clients.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::data_io::ClassEntry;
use crate::engine::ClusterResult;
use crate::provider::{BackendKind, Location, MapStyle, QuerySpec, ValidationError, DEFAULT_LIMIT_PER_CLASS};
use crate::render::LegendEntry;

/// Body of `POST /api/cluster`: either a location-based query or an inline tree.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<Location>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preferences: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_per_class: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map_style: Option<MapStyle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<Vec<ClassEntry>>,
}

/// Where a request's tree comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeSource {
    Query(QuerySpec),
    Inline(Value),
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, key: &str) -> Option<&'a Value> {
    obj.get(key).filter(|v| !v.is_null())
}

impl ClusterRequest {
    pub fn from_query(spec: &QuerySpec) -> Self {
        Self {
            location: Some(spec.location.clone()),
            radius_km: Some(spec.radius_km),
            preferences: Some(spec.preferences.clone()),
            limit_per_class: Some(spec.limit_per_class),
            map_style: Some(spec.map_style),
            tree: None,
        }
    }

    pub fn inline(tree: Vec<ClassEntry>) -> Self {
        Self { tree: Some(tree), ..Self::default() }
    }

    /// Checks a raw body field by field so errors can name the field.
    pub fn source_from_value(body: &Value) -> Result<(TreeSource, MapStyle), ValidationError> {
        let obj = body.as_object().ok_or_else(|| ValidationError::new("body", "expected a JSON object"))?;
        let map_style = match field(obj, "map_style") {
            None => MapStyle::default(),
            Some(v) => v
                .as_str()
                .and_then(MapStyle::parse)
                .ok_or_else(|| ValidationError::new("map_style", "expected \"openstreetmap\" or \"terrain\""))?,
        };

        match (field(obj, "tree"), field(obj, "location")) {
            (Some(_), Some(_)) => Err(ValidationError::new("tree", "give either an inline tree or a location, not both")),
            (Some(tree), None) => Ok((TreeSource::Inline(tree.clone()), map_style)),
            (None, None) => Err(ValidationError::new("location", "required unless an inline tree is given")),
            (None, Some(loc)) => {
                let location: Location = serde_json::from_value(loc.clone())
                    .map_err(|e| ValidationError::new("location", format!("expected a place name or {{lat, lon}}: {e}")))?;
                let radius_km = field(obj, "radius_km")
                    .ok_or_else(|| ValidationError::new("radius_km", "required"))?
                    .as_f64()
                    .ok_or_else(|| ValidationError::new("radius_km", "expected a number"))?;
                let preferences = field(obj, "preferences")
                    .ok_or_else(|| ValidationError::new("preferences", "required"))?
                    .as_array()
                    .and_then(|a| a.iter().map(|p| p.as_str().map(str::to_string)).collect::<Option<Vec<_>>>())
                    .ok_or_else(|| ValidationError::new("preferences", "expected an array of strings"))?;
                let limit_per_class = match field(obj, "limit_per_class") {
                    None => DEFAULT_LIMIT_PER_CLASS,
                    Some(v) => v
                        .as_u64()
                        .map(|n| n as usize)
                        .ok_or_else(|| ValidationError::new("limit_per_class", "expected a positive integer"))?,
                };
                let spec = QuerySpec { location, radius_km, preferences, limit_per_class, map_style };
                spec.validate()?;
                Ok((TreeSource::Query(spec), map_style))
            }
        }
    }
}

/// Body of a successful `POST /api/cluster`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResponse {
    #[serde(flatten)]
    pub result: ClusterResult,
    pub geojson: Value,
    pub legend: Vec<LegendEntry>,
    pub query_echo: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub version: String,
    pub backend: BackendKind,
    /// Set when the live backend has no credentials configured.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub credential_warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}
