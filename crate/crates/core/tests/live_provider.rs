//! The HTTP backend against a local stand-in server.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::{Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use prefclust_core::provider::{
    fetch_tree, geocode, search_venues, Credentials, FetchError, HttpProvider, Location, MapStyle, ProviderError,
    QuerySpec, RetryPolicy,
};
use prefclust_core::GeoPoint;
use serde_json::{json, Value};

#[derive(Clone, Copy)]
enum Mode {
    Ok,
    FailTwiceThenOk,
    RateLimitOnce,
    Unauthorized,
    AlwaysDown,
}

struct Mock {
    mode: Mode,
    hits: AtomicUsize,
    last_query: std::sync::Mutex<HashMap<String, String>>,
}

async fn venues(State(mock): State<Arc<Mock>>, Query(q): Query<HashMap<String, String>>) -> Response {
    let n = mock.hits.fetch_add(1, Ordering::SeqCst);
    *mock.last_query.lock().unwrap() = q.clone();
    match mock.mode {
        Mode::Unauthorized => return (StatusCode::UNAUTHORIZED, "invalid_auth").into_response(),
        Mode::AlwaysDown => return StatusCode::SERVICE_UNAVAILABLE.into_response(),
        Mode::FailTwiceThenOk if n < 2 => return StatusCode::BAD_GATEWAY.into_response(),
        Mode::RateLimitOnce if n == 0 => {
            let mut h = HeaderMap::new();
            h.insert("retry-after", "1".parse().unwrap());
            return (StatusCode::TOO_MANY_REQUESTS, h).into_response();
        }
        _ => {}
    }
    let query = q.get("query").cloned().unwrap_or_default();
    Json(json!({
        "meta": {"code": 200},
        "response": {"venues": [
            {"id": "v1", "name": format!("{query} one"), "location": {"lat": 22.5730, "lng": 88.3640}},
            {"id": "v2", "name": format!("{query} two"), "location": {"lat": 22.5800, "lng": 88.3700}},
            {"id": "v2b", "name": format!("{query} two"), "location": {"lat": 22.580001, "lng": 88.370001}},
            {"id": "far", "name": "far away", "location": {"lat": 23.5, "lng": 88.3640}},
            {"id": "nameless", "name": "  ", "location": {"lat": 22.5730, "lng": 88.3640}},
            {"id": "noloc", "name": "no location"}
        ]}
    }))
    .into_response()
}

async fn search(Query(q): Query<HashMap<String, String>>) -> Json<Value> {
    match q.get("q").map(String::as_str) {
        Some("Kolkata") => Json(json!([{"lat": "22.5726", "lon": "88.3639", "display_name": "Kolkata"}])),
        _ => Json(json!([])),
    }
}

async fn serve(mode: Mode) -> (String, Arc<Mock>) {
    let mock = Arc::new(Mock { mode, hits: AtomicUsize::new(0), last_query: Default::default() });
    let app = Router::new()
        .route("/venues/search", get(venues))
        .route("/search", get(search))
        .with_state(mock.clone());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (base, mock)
}

fn creds() -> Option<Credentials> {
    Some(Credentials { client_id: "id-123".into(), client_secret: "secret-456".into() })
}

fn provider(base: &str, credentials: Option<Credentials>) -> HttpProvider {
    HttpProvider::new(base, base, credentials)
        .with_retry(RetryPolicy { retries: 3, base_delay: Duration::from_millis(5) })
}

fn kolkata() -> GeoPoint {
    GeoPoint::new(22.5726, 88.3639).unwrap()
}

#[tokio::test]
async fn venues_are_parsed_filtered_and_deduplicated() {
    let (base, mock) = serve(Mode::Ok).await;
    let p = provider(&base, creds());
    let got = search_venues(&p, kolkata(), 5.0, "gym", 10).await.unwrap();
    let names: Vec<_> = got.iter().map(|v| v.name.as_str()).collect();
    assert_eq!(names, ["gym one", "gym two"]);
    assert_eq!(got[0].source_id, "v1");

    let q = mock.last_query.lock().unwrap().clone();
    assert_eq!(q["radius"], "5000");
    assert_eq!(q["query"], "gym");
    assert_eq!(q["client_id"], "id-123");
    assert_eq!(q["ll"], "22.5726,88.3639");
}

#[tokio::test]
async fn limit_truncates() {
    let (base, _) = serve(Mode::Ok).await;
    let got = search_venues(&provider(&base, creds()), kolkata(), 5.0, "gym", 1).await.unwrap();
    assert_eq!(got.len(), 1);
}

#[tokio::test]
async fn server_errors_are_retried() {
    let (base, mock) = serve(Mode::FailTwiceThenOk).await;
    let got = search_venues(&provider(&base, creds()), kolkata(), 5.0, "park", 10).await.unwrap();
    assert_eq!(got.len(), 2);
    assert_eq!(mock.hits.load(Ordering::SeqCst), 3);
}

#[tokio::test]
async fn persistent_outage_gives_up() {
    let (base, mock) = serve(Mode::AlwaysDown).await;
    let err = search_venues(&provider(&base, creds()), kolkata(), 5.0, "park", 10).await.unwrap_err();
    assert!(matches!(err, ProviderError::Unavailable(_)), "{err:?}");
    assert_eq!(mock.hits.load(Ordering::SeqCst), 4);
}

#[tokio::test]
async fn rate_limit_waits_for_retry_after() {
    let (base, mock) = serve(Mode::RateLimitOnce).await;
    let started = Instant::now();
    let got = search_venues(&provider(&base, creds()), kolkata(), 5.0, "park", 10).await.unwrap();
    assert_eq!(got.len(), 2);
    assert_eq!(mock.hits.load(Ordering::SeqCst), 2);
    assert!(started.elapsed() >= Duration::from_millis(950));
}

#[tokio::test]
async fn rejected_credentials_are_not_retried() {
    let (base, mock) = serve(Mode::Unauthorized).await;
    let err = search_venues(&provider(&base, creds()), kolkata(), 5.0, "park", 10).await.unwrap_err();
    match err {
        ProviderError::Unavailable(msg) => {
            assert!(msg.contains("authentication"), "{msg}");
            assert!(!msg.contains("secret-456"));
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(mock.hits.load(Ordering::SeqCst), 1);
}

#[tokio::test]
async fn missing_credentials_fail_without_a_request() {
    let (base, mock) = serve(Mode::Ok).await;
    let p = provider(&base, None);
    assert!(!p.has_credentials());
    let err = search_venues(&p, kolkata(), 5.0, "park", 10).await.unwrap_err();
    assert!(matches!(&err, ProviderError::Unavailable(m) if m.contains("no credentials")), "{err:?}");
    assert_eq!(mock.hits.load(Ordering::SeqCst), 0);
}

#[tokio::test]
async fn geocoding() {
    let (base, _) = serve(Mode::Ok).await;
    let p = provider(&base, creds());
    assert_eq!(geocode(&p, "Kolkata").await.unwrap(), kolkata());
    assert!(matches!(geocode(&p, "Atlantis").await, Err(ProviderError::NotFound(_))));
    assert!(matches!(geocode(&p, "  ").await, Err(ProviderError::InvalidInput(_))));
}

#[tokio::test]
async fn fetch_tree_over_http() {
    let (base, _) = serve(Mode::Ok).await;
    let spec = QuerySpec {
        location: Location::Place("Kolkata".into()),
        radius_km: 5.0,
        preferences: vec!["gym".into(), "park".into()],
        limit_per_class: 50,
        map_style: MapStyle::OpenStreetMap,
    };
    let tree = fetch_tree(&provider(&base, creds()), &spec).await.unwrap();
    assert_eq!(tree.len(), 2);
    assert_eq!(tree.node_count(), 4);

    let lost = QuerySpec { location: Location::Place("Atlantis".into()), ..spec };
    let err = fetch_tree(&provider(&base, creds()), &lost).await.unwrap_err();
    assert!(matches!(err, FetchError::Geocode(ProviderError::NotFound(_))));
}

#[test]
fn credentials_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("creds.toml");
    std::fs::write(&path, "client_id = \"a\"\nclient_secret = \"hunter2\"\n").unwrap();
    let c = Credentials::from_file(&path).unwrap();
    assert_eq!((c.client_id.as_str(), c.client_secret.as_str()), ("a", "hunter2"));
    assert!(!format!("{c:?}").contains("hunter2"));

    std::fs::write(&path, "client_id = \"a\"\n").unwrap();
    assert!(Credentials::from_file(&path).is_err());
}
