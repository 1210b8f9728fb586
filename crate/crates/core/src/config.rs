//! Flat dotted-key configuration.
//!
//! Sources in increasing precedence: built-in defaults, a TOML file
//! (`server.listen = "..."` or `[server]` tables), `PREFCLUST_*` environment
//! variables (`server.listen` -> `PREFCLUST_SERVER_LISTEN`), then explicit
//! overrides from command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::provider::MapStyle;

pub const SERVER_LISTEN: &str = "server.listen";
pub const PROVIDER_BACKEND: &str = "provider.backend";
pub const PROVIDER_BASE_URL: &str = "provider.base_url";
pub const PROVIDER_GEOCODER_URL: &str = "provider.geocoder_url";
pub const PROVIDER_FIXTURES: &str = "provider.fixtures";
pub const TILES_OSM: &str = "tiles.osm";
pub const TILES_TERRAIN: &str = "tiles.terrain";
pub const WEBUI_DIR: &str = "webui.dir";

pub const ENV_CONFIG_FILE: &str = "PREFCLUST_CONFIG";

const DEFAULTS: &[(&str, &str)] = &[
    (SERVER_LISTEN, "127.0.0.1:8080"),
    (PROVIDER_BACKEND, "fixture"),
    (PROVIDER_BASE_URL, "https://api.foursquare.com/v2"),
    (PROVIDER_GEOCODER_URL, "https://nominatim.openstreetmap.org"),
    (PROVIDER_FIXTURES, "fixtures"),
    (TILES_OSM, "https://tile.openstreetmap.org/{z}/{x}/{y}.png"),
    (TILES_TERRAIN, "https://tiles.stadiamaps.com/tiles/stamen_terrain/{z}/{x}/{y}.png"),
    (WEBUI_DIR, "webui/dist"),
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {message}")]
    Read { path: String, message: String },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Default for Config {
    fn default() -> Self {
        Self { values: DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect() }
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, String>) {
    for (key, value) in table {
        let full = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
        match value {
            toml::Value::Table(t) => flatten(&full, t, out),
            toml::Value::String(s) => {
                out.insert(full, s.clone());
            }
            other => {
                out.insert(full, other.to_string());
            }
        }
    }
}

pub fn env_key(key: &str) -> String {
    format!("PREFCLUST_{}", key.replace('.', "_").to_ascii_uppercase())
}

impl Config {
    /// Defaults, then `file` (or `$PREFCLUST_CONFIG`), then the environment.
    pub fn load(file: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config = Config::default();
        let env_file = std::env::var(ENV_CONFIG_FILE).ok();
        if let Some(path) = file.or(env_file.as_deref().map(Path::new)) {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::Read { path: path.display().to_string(), message: e.to_string() })?;
            config.merge_toml(&text).map_err(|message| ConfigError::Parse { path: path.display().to_string(), message })?;
        }
        config.merge_env(|k| std::env::var(k).ok());
        Ok(config)
    }

    pub fn merge_toml(&mut self, text: &str) -> Result<(), String> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
        flatten("", &table, &mut self.values);
        Ok(())
    }

    /// Overrides every known key that `lookup` has a value for.
    pub fn merge_env(&mut self, lookup: impl Fn(&str) -> Option<String>) {
        for (key, _) in DEFAULTS {
            if let Some(v) = lookup(&env_key(key)) {
                self.values.insert(key.to_string(), v);
            }
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn must(&self, key: &str) -> &str {
        self.get(key).unwrap_or_default()
    }

    pub fn listen(&self) -> &str {
        self.must(SERVER_LISTEN)
    }

    pub fn tiles(&self) -> TileTemplates {
        TileTemplates { osm: self.must(TILES_OSM).to_string(), terrain: self.must(TILES_TERRAIN).to_string() }
    }
}

/// Slippy-map tile URL templates per map style.
#[derive(Debug, Clone, PartialEq)]
pub struct TileTemplates {
    pub osm: String,
    pub terrain: String,
}

impl Default for TileTemplates {
    fn default() -> Self {
        Config::default().tiles()
    }
}

impl TileTemplates {
    pub fn for_style(&self, style: MapStyle) -> &str {
        match style {
            MapStyle::OpenStreetMap => &self.osm,
            MapStyle::Terrain => &self.terrain,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = Config::default();
        assert_eq!(c.listen(), "127.0.0.1:8080");
        assert_eq!(c.get(PROVIDER_BACKEND), Some("fixture"));
    }

    #[test]
    fn file_then_env_then_flags() {
        let mut c = Config::default();
        c.merge_toml("server.listen = \"0.0.0.0:1\"\n[tiles]\nosm = \"http://t/{z}/{x}/{y}\"\n").unwrap();
        assert_eq!(c.listen(), "0.0.0.0:1");
        assert_eq!(c.tiles().osm, "http://t/{z}/{x}/{y}");

        c.merge_env(|k| (k == "PREFCLUST_SERVER_LISTEN").then(|| "0.0.0.0:2".to_string()));
        assert_eq!(c.listen(), "0.0.0.0:2");

        c.set(SERVER_LISTEN, "0.0.0.0:3");
        assert_eq!(c.listen(), "0.0.0.0:3");
    }

    #[test]
    fn bad_toml_is_an_error() {
        assert!(Config::default().merge_toml("server.listen = ").is_err());
    }

    #[test]
    fn env_keys() {
        assert_eq!(env_key("tiles.terrain"), "PREFCLUST_TILES_TERRAIN");
    }
}
