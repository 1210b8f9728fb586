//! Offline backend reading JSON files from a directory.
//!
//! `<place>.geocode.json` holds `{"lat": .., "lon": ..}`.
//! `<place>.<category>.venues.json` holds `[{"name", "lat", "lon", "id"?}]`.
//! Place and category names are slugged with [`slug`]. A search loads every
//! venue file for the category, in file-name order, and relies on the radius
//! post-filter for locality.

use std::path::{Path, PathBuf};

use async_trait::async_trait;
use serde::Deserialize;

use super::{BackendKind, PoiProvider, ProviderError, Venue};
use crate::geo::GeoPoint;

/// Lowercase ASCII alphanumerics, everything else collapsed to `_`.
pub fn slug(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.trim().chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

#[derive(Debug, Clone)]
pub struct FixtureProvider {
    dir: PathBuf,
}

#[derive(Deserialize)]
struct FixtureVenue {
    name: String,
    lat: f64,
    lon: f64,
    #[serde(default)]
    id: Option<String>,
}

impl FixtureProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    async fn read(&self, path: &Path) -> Result<String, ProviderError> {
        tokio::fs::read_to_string(path)
            .await
            .map_err(|e| ProviderError::Unavailable(format!("fixture {}: {e}", path.display())))
    }

    async fn venue_files(&self, category: &str) -> Result<Vec<PathBuf>, ProviderError> {
        let suffix = format!(".{}.venues.json", slug(category));
        let mut entries = tokio::fs::read_dir(&self.dir)
            .await
            .map_err(|e| ProviderError::Unavailable(format!("fixture dir {}: {e}", self.dir.display())))?;
        let mut files = Vec::new();
        while let Some(entry) = entries.next_entry().await.map_err(|e| ProviderError::Unavailable(e.to_string()))? {
            let name = entry.file_name();
            if name.to_string_lossy().ends_with(&suffix) {
                files.push(entry.path());
            }
        }
        files.sort();
        Ok(files)
    }
}

#[async_trait]
impl PoiProvider for FixtureProvider {
    fn kind(&self) -> BackendKind {
        BackendKind::Fixture
    }

    async fn geocode(&self, place: &str) -> Result<GeoPoint, ProviderError> {
        let path = self.dir.join(format!("{}.geocode.json", slug(place)));
        if !path.is_file() {
            return Err(ProviderError::NotFound(place.to_string()));
        }
        let text = self.read(&path).await?;
        serde_json::from_str::<GeoPoint>(&text)
            .map_err(|e| ProviderError::Unavailable(format!("fixture {}: {e}", path.display())))
    }

    async fn venues(
        &self,
        _center: GeoPoint,
        _radius_km: f64,
        category: &str,
        _limit: usize,
    ) -> Result<Vec<Venue>, ProviderError> {
        let mut out = Vec::new();
        for path in self.venue_files(category).await? {
            let text = self.read(&path).await?;
            let rows: Vec<FixtureVenue> = serde_json::from_str(&text)
                .map_err(|e| ProviderError::Unavailable(format!("fixture {}: {e}", path.display())))?;
            for (i, row) in rows.into_iter().enumerate() {
                let Ok(point) = GeoPoint::new(row.lat, row.lon) else {
                    tracing::warn!("skipping {:?} in {}: bad coordinates", row.name, path.display());
                    continue;
                };
                let stem = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                out.push(Venue {
                    name: row.name,
                    point,
                    category: category.to_string(),
                    source_id: row.id.unwrap_or_else(|| format!("{stem}#{i}")),
                });
            }
        }
        Ok(out)
    }
}
