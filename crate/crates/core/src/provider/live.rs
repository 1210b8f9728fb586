//! HTTP backend.
//!
//! Provider field names live only in a [`VenueAdapter`]. Transport errors
//! and 5xx responses are retried with exponential backoff (0.5 s, 1 s, 2 s by
//! default); 429 responses wait for `Retry-After` when the server sends one.

use std::path::Path;
use std::time::Duration;

use async_trait::async_trait;
use reqwest::{Client, RequestBuilder, StatusCode};
use serde::Deserialize;
use serde_json::Value;

use super::{BackendKind, PoiProvider, ProviderError, Venue};
use crate::geo::GeoPoint;

pub const ENV_PROVIDER_ID: &str = "PREFCLUST_PROVIDER_ID";
pub const ENV_PROVIDER_SECRET: &str = "PREFCLUST_PROVIDER_SECRET";
pub const ENV_CREDENTIALS_FILE: &str = "PREFCLUST_CREDENTIALS_FILE";

#[derive(Clone, PartialEq, Deserialize)]
pub struct Credentials {
    pub client_id: String,
    pub client_secret: String,
}

impl std::fmt::Debug for Credentials {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Credentials").field("client_id", &self.client_id).finish_non_exhaustive()
    }
}

impl Credentials {
    /// From `PREFCLUST_PROVIDER_ID`/`PREFCLUST_PROVIDER_SECRET`, falling back
    /// to the TOML file named by `PREFCLUST_CREDENTIALS_FILE`.
    pub fn from_env() -> Result<Option<Self>, String> {
        if let (Ok(id), Ok(secret)) = (std::env::var(ENV_PROVIDER_ID), std::env::var(ENV_PROVIDER_SECRET)) {
            return Ok(Some(Credentials { client_id: id, client_secret: secret }));
        }
        match std::env::var(ENV_CREDENTIALS_FILE) {
            Ok(path) => Self::from_file(Path::new(&path)).map(Some),
            Err(_) => Ok(None),
        }
    }

    /// `client_id = "..."` and `client_secret = "..."`.
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { retries: 3, base_delay: Duration::from_millis(500) }
    }
}

impl RetryPolicy {
    pub fn delay(&self, attempt: u32) -> Duration {
        self.base_delay * 2u32.saturating_pow(attempt)
    }
}

/// What to search for around a point.
#[derive(Debug, Clone, Copy)]
pub struct VenueQuery<'a> {
    pub center: GeoPoint,
    pub radius_km: f64,
    pub category: &'a str,
    pub limit: usize,
}

/// Maps one provider's wire format onto [`Venue`] and [`GeoPoint`].
pub trait VenueAdapter: Send + Sync {
    fn venue_request(
        &self,
        client: &Client,
        base_url: &str,
        credentials: &Credentials,
        query: VenueQuery<'_>,
    ) -> RequestBuilder;

    fn parse_venues(&self, body: &Value, category: &str) -> Result<Vec<Venue>, ProviderError>;

    fn geocode_request(&self, client: &Client, geocoder_url: &str, place: &str) -> RequestBuilder;

    /// `Ok(None)` when the geocoder found nothing.
    fn parse_geocode(&self, body: &Value) -> Result<Option<GeoPoint>, ProviderError>;
}

/// Foursquare v2 `venues/search` for venues, a Nominatim-style `/search` for geocoding.
#[derive(Debug, Clone)]
pub struct FoursquareAdapter {
    pub api_version: String,
}

impl Default for FoursquareAdapter {
    fn default() -> Self {
        Self { api_version: "20190425".into() }
    }
}

fn bad_payload(what: &str) -> ProviderError {
    ProviderError::Unavailable(format!("unexpected response payload: {what}"))
}

impl VenueAdapter for FoursquareAdapter {
    fn venue_request(
        &self,
        client: &Client,
        base_url: &str,
        credentials: &Credentials,
        query: VenueQuery<'_>,
    ) -> RequestBuilder {
        let VenueQuery { center, radius_km, category, limit } = query;
        let url = format!("{}/venues/search", base_url.trim_end_matches('/'));
        client.get(url).query(&[
            ("ll", format!("{},{}", center.lat(), center.lon())),
            ("radius", format!("{}", (radius_km * 1000.0).round() as u64)),
            ("query", category.to_string()),
            ("limit", limit.to_string()),
            ("intent", "browse".to_string()),
            ("client_id", credentials.client_id.clone()),
            ("client_secret", credentials.client_secret.clone()),
            ("v", self.api_version.clone()),
        ])
    }

    fn parse_venues(&self, body: &Value, category: &str) -> Result<Vec<Venue>, ProviderError> {
        let venues = body
            .pointer("/response/venues")
            .and_then(Value::as_array)
            .ok_or_else(|| bad_payload("missing response.venues"))?;
        let mut out = Vec::with_capacity(venues.len());
        for v in venues {
            let name = v.get("name").and_then(Value::as_str).unwrap_or_default();
            let lat = v.pointer("/location/lat").and_then(Value::as_f64);
            let lon = v.pointer("/location/lng").and_then(Value::as_f64);
            let (Some(lat), Some(lon)) = (lat, lon) else { continue };
            let Ok(point) = GeoPoint::new(lat, lon) else { continue };
            if name.trim().is_empty() {
                continue;
            }
            out.push(Venue {
                name: name.trim().to_string(),
                point,
                category: category.to_string(),
                source_id: v.get("id").and_then(Value::as_str).unwrap_or_default().to_string(),
            });
        }
        Ok(out)
    }

    fn geocode_request(&self, client: &Client, geocoder_url: &str, place: &str) -> RequestBuilder {
        let url = format!("{}/search", geocoder_url.trim_end_matches('/'));
        client.get(url).query(&[("q", place), ("format", "json"), ("limit", "1")])
    }

    fn parse_geocode(&self, body: &Value) -> Result<Option<GeoPoint>, ProviderError> {
        let hits = body.as_array().ok_or_else(|| bad_payload("geocoder did not return an array"))?;
        let Some(first) = hits.first() else { return Ok(None) };
        // Nominatim sends coordinates as strings
        let num = |key: &str| match first.get(key) {
            Some(Value::String(s)) => s.parse::<f64>().ok(),
            Some(v) => v.as_f64(),
            None => None,
        };
        let (lat, lon) = num("lat").zip(num("lon")).ok_or_else(|| bad_payload("geocoder hit without lat/lon"))?;
        GeoPoint::new(lat, lon).map(Some).map_err(|e| bad_payload(&e.to_string()))
    }
}

pub struct HttpProvider {
    client: Client,
    base_url: String,
    geocoder_url: String,
    credentials: Option<Credentials>,
    retry: RetryPolicy,
    adapter: Box<dyn VenueAdapter>,
}

impl HttpProvider {
    pub fn new(base_url: impl Into<String>, geocoder_url: impl Into<String>, credentials: Option<Credentials>) -> Self {
        let client = Client::builder()
            .timeout(Duration::from_secs(20))
            .user_agent(concat!("prefclust/", env!("CARGO_PKG_VERSION")))
            .build()
            .expect("static client configuration");
        Self {
            client,
            base_url: base_url.into(),
            geocoder_url: geocoder_url.into(),
            credentials,
            retry: RetryPolicy::default(),
            adapter: Box::new(FoursquareAdapter::default()),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_adapter(mut self, adapter: Box<dyn VenueAdapter>) -> Self {
        self.adapter = adapter;
        self
    }

    pub fn has_credentials(&self) -> bool {
        self.credentials.is_some()
    }

    async fn send_json(&self, make: impl Fn() -> RequestBuilder) -> Result<Value, ProviderError> {
        let mut last_err = ProviderError::Unavailable("no attempt made".into());
        for attempt in 0..=self.retry.retries {
            if attempt > 0 {
                let wait = match &last_err {
                    ProviderError::RateLimited { retry_after: Some(d) } => *d,
                    _ => self.retry.delay(attempt - 1),
                };
                tokio::time::sleep(wait).await;
            }
            let response = match make().send().await {
                Ok(r) => r,
                Err(e) => {
                    tracing::warn!(attempt, "provider request failed: {e}");
                    last_err = ProviderError::Unavailable(e.to_string());
                    continue;
                }
            };
            let status = response.status();
            if status == StatusCode::TOO_MANY_REQUESTS {
                let retry_after = response
                    .headers()
                    .get(reqwest::header::RETRY_AFTER)
                    .and_then(|v| v.to_str().ok())
                    .and_then(|v| v.trim().parse::<u64>().ok())
                    .map(Duration::from_secs);
                last_err = ProviderError::RateLimited { retry_after };
                continue;
            }
            if status == StatusCode::UNAUTHORIZED || status == StatusCode::FORBIDDEN {
                let body = response.text().await.unwrap_or_default();
                return Err(ProviderError::Unavailable(format!(
                    "authentication rejected ({status}): check {ENV_PROVIDER_ID}/{ENV_PROVIDER_SECRET}; {}",
                    body.chars().take(200).collect::<String>()
                )));
            }
            if status.is_server_error() {
                last_err = ProviderError::Unavailable(format!("server error {status}"));
                continue;
            }
            if !status.is_success() {
                return Err(ProviderError::Unavailable(format!("unexpected status {status}")));
            }
            return response.json::<Value>().await.map_err(|e| bad_payload(&e.to_string()));
        }
        Err(last_err)
    }
}

#[async_trait]
impl PoiProvider for HttpProvider {
    fn kind(&self) -> BackendKind {
        BackendKind::Live
    }

    async fn geocode(&self, place: &str) -> Result<GeoPoint, ProviderError> {
        let body = self.send_json(|| self.adapter.geocode_request(&self.client, &self.geocoder_url, place)).await?;
        self.adapter.parse_geocode(&body)?.ok_or_else(|| ProviderError::NotFound(place.to_string()))
    }

    async fn venues(
        &self,
        center: GeoPoint,
        radius_km: f64,
        category: &str,
        limit: usize,
    ) -> Result<Vec<Venue>, ProviderError> {
        let credentials = self.credentials.as_ref().ok_or_else(|| {
            ProviderError::Unavailable(format!(
                "authentication: no credentials; set {ENV_PROVIDER_ID} and {ENV_PROVIDER_SECRET} or {ENV_CREDENTIALS_FILE}"
            ))
        })?;
        let body = self
            .send_json(|| {
                let query = VenueQuery { center, radius_km, category, limit };
                self.adapter.venue_request(&self.client, &self.base_url, credentials, query)
            })
            .await?;
        self.adapter.parse_venues(&body, category)
    }
}
