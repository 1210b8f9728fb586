//! Points-of-interest sources: geocoding plus category-scoped venue search.
//!
//! Backends implement [`PoiProvider`]; the free functions here apply the
//! rules every backend shares (argument checks, radius post-filter,
//! de-duplication, truncation) and assemble a [`PreferenceTree`].

mod fixture;
mod live;

use std::collections::HashSet;
use std::fmt;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{haversine_km, GeoPoint};
use crate::tree::PreferenceTree;

pub use fixture::{slug, FixtureProvider};
pub use live::{Credentials, FoursquareAdapter, HttpProvider, RetryPolicy, VenueAdapter, VenueQuery};

pub const MAX_RADIUS_KM: f64 = 50.0;
pub const MAX_PREFERENCES: usize = 30;
pub const MAX_LIMIT_PER_CLASS: usize = 100;
pub const DEFAULT_LIMIT_PER_CLASS: usize = 50;
/// Slack allowed past the requested radius before a venue is dropped.
pub const RADIUS_SLACK_KM: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Location {
    Place(String),
    Point(GeoPoint),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapStyle {
    #[default]
    #[serde(alias = "osm")]
    OpenStreetMap,
    Terrain,
}

impl MapStyle {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "osm" | "openstreetmap" => Some(MapStyle::OpenStreetMap),
            "terrain" => Some(MapStyle::Terrain),
            _ => None,
        }
    }
}

/// A field-level validation failure.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{field}: {message}")]
pub struct ValidationError {
    pub field: String,
    pub message: String,
}

impl ValidationError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

/// One user request: where, how far, and which classes in which order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub location: Location,
    pub radius_km: f64,
    pub preferences: Vec<String>,
    #[serde(default = "default_limit")]
    pub limit_per_class: usize,
    #[serde(default)]
    pub map_style: MapStyle,
}

fn default_limit() -> usize {
    DEFAULT_LIMIT_PER_CLASS
}

pub fn validate_radius(radius_km: f64) -> Result<(), ValidationError> {
    if !(radius_km > 0.0 && radius_km <= MAX_RADIUS_KM) {
        return Err(ValidationError::new(
            "radius_km",
            format!("must be in (0, {MAX_RADIUS_KM}] km, got {radius_km}"),
        ));
    }
    Ok(())
}

impl QuerySpec {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if let Location::Place(place) = &self.location {
            if place.trim().is_empty() {
                return Err(ValidationError::new("location", "must not be empty"));
            }
        }
        validate_radius(self.radius_km)?;
        if self.preferences.is_empty() || self.preferences.len() > MAX_PREFERENCES {
            return Err(ValidationError::new(
                "preferences",
                format!("need 1 to {MAX_PREFERENCES} preferences, got {}", self.preferences.len()),
            ));
        }
        let mut seen = HashSet::new();
        for p in &self.preferences {
            if p.trim().is_empty() {
                return Err(ValidationError::new("preferences", "preference names must not be empty"));
            }
            if !seen.insert(p.trim().to_ascii_lowercase()) {
                return Err(ValidationError::new("preferences", format!("duplicate preference {p:?}")));
            }
        }
        if self.limit_per_class == 0 || self.limit_per_class > MAX_LIMIT_PER_CLASS {
            return Err(ValidationError::new(
                "limit_per_class",
                format!("must be in 1..={MAX_LIMIT_PER_CLASS}, got {}", self.limit_per_class),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Venue {
    pub name: String,
    pub point: GeoPoint,
    pub category: String,
    pub source_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Live,
    Fixture,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Live => "live",
            BackendKind::Fixture => "fixture",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProviderError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("provider unavailable: {0}")]
    Unavailable(String),
    #[error("rate limited (retry after {retry_after:?})")]
    RateLimited { retry_after: Option<Duration> },
}

#[async_trait]
pub trait PoiProvider: Send + Sync {
    fn kind(&self) -> BackendKind;

    async fn geocode(&self, place: &str) -> Result<GeoPoint, ProviderError>;

    /// Raw backend results; callers should go through [`search_venues`].
    async fn venues(
        &self,
        center: GeoPoint,
        radius_km: f64,
        category: &str,
        limit: usize,
    ) -> Result<Vec<Venue>, ProviderError>;
}

/// Resolves a place name to one representative point.
pub async fn geocode(provider: &dyn PoiProvider, place: &str) -> Result<GeoPoint, ProviderError> {
    if place.trim().is_empty() {
        return Err(ProviderError::InvalidInput("place must not be empty".into()));
    }
    provider.geocode(place.trim()).await
}

/// At most `limit` venues of `category` within `radius_km` (+0.1 km) of
/// `center`, de-duplicated by name and 5-decimal coordinates, in backend order.
pub async fn search_venues(
    provider: &dyn PoiProvider,
    center: GeoPoint,
    radius_km: f64,
    category: &str,
    limit: usize,
) -> Result<Vec<Venue>, ProviderError> {
    validate_radius(radius_km).map_err(|e| ProviderError::InvalidInput(e.to_string()))?;
    if limit == 0 {
        return Ok(Vec::new());
    }
    let raw = provider.venues(center, radius_km, category, limit).await?;
    let mut seen = HashSet::new();
    let venues = raw
        .into_iter()
        .filter(|v| !v.name.trim().is_empty())
        .filter(|v| haversine_km(center, v.point).get() <= radius_km + RADIUS_SLACK_KM)
        .filter(|v| {
            let key = (v.name.clone(), (v.point.lat() * 1e5).round() as i64, (v.point.lon() * 1e5).round() as i64);
            seen.insert(key)
        })
        .take(limit)
        .collect();
    Ok(venues)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FetchError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("geocoding failed: {0}")]
    Geocode(ProviderError),
    #[error("class {class:?}: {source}")]
    Class { class: String, source: ProviderError },
}

impl FetchError {
    pub fn provider_error(&self) -> Option<&ProviderError> {
        match self {
            FetchError::Invalid(_) => None,
            FetchError::Geocode(e) | FetchError::Class { source: e, .. } => Some(e),
        }
    }
}

pub async fn resolve_location(provider: &dyn PoiProvider, location: &Location) -> Result<GeoPoint, FetchError> {
    match location {
        Location::Point(p) => Ok(*p),
        Location::Place(place) => geocode(provider, place).await.map_err(FetchError::Geocode),
    }
}

/// One class per preference, in order. Classes without venues stay in the
/// tree, empty. Classes are fetched one after another.
pub async fn fetch_tree(provider: &dyn PoiProvider, spec: &QuerySpec) -> Result<PreferenceTree, FetchError> {
    spec.validate()?;
    let center = resolve_location(provider, &spec.location).await?;
    let mut tree = PreferenceTree::new();
    for pref in &spec.preferences {
        let class_id = tree.add_class(pref).map_err(|e| ValidationError::new("preferences", e.to_string()))?;
        let venues = search_venues(provider, center, spec.radius_km, pref.trim(), spec.limit_per_class)
            .await
            .map_err(|source| FetchError::Class { class: pref.clone(), source })?;
        for v in venues {
            tree.push_node(class_id, &v.name, v.point).expect("class exists and names are non-empty");
        }
    }
    Ok(tree)
}
