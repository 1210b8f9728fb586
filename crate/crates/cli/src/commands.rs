use std::path::{Path, PathBuf};

use prefclust_client::{Client, ClientError};
use prefclust_core::config::{self, Config};
use prefclust_core::data_io::{parse_tree_csv, parse_tree_json, serialize_result_json, tree_document, write_tree_csv};
use prefclust_core::provider::{fetch_tree, FetchError, Location, MapStyle, QuerySpec};
use prefclust_core::render::render_html;
use prefclust_core::wire::{ClusterRequest, ClusterResponse};
use prefclust_core::GeoPoint;
use prefclust_service::{cluster_response, ApiError, AppState};

use crate::table::matrix_table;
use crate::{Backend, ClusterArgs, FetchArgs, Failure, Format, ServeArgs, Style};

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    Config::load(path).map_err(|e| Failure::Io(format!("config: {e}")))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))
}

fn from_status(status: u16, message: String) -> Failure {
    match status {
        400 | 422 => Failure::Validation(message),
        404 | 502 | 503 => Failure::Provider(message),
        _ => Failure::Io(message),
    }
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        from_status(e.status.as_u16(), e.message)
    }
}

impl From<ClientError> for Failure {
    fn from(e: ClientError) -> Self {
        match e.status() {
            Some(status) => from_status(status, e.to_string()),
            None => Failure::Io(e.to_string()),
        }
    }
}

pub async fn cluster(args: ClusterArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Failure::Io(format!("reading {}: {e}", args.input.display())))?;
    let is_json = args.input.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let format = args.format.unwrap_or(if is_json { Format::Json } else { Format::Csv });
    let parsed = match format {
        Format::Csv => parse_tree_csv(&text),
        Format::Json => parse_tree_json(&text),
    }
    .map_err(|e| Failure::Validation(format!("{}: {e}", args.input.display())))?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let tree = parsed.tree;
    let style = match args.style {
        Style::Osm => MapStyle::OpenStreetMap,
        Style::Terrain => MapStyle::Terrain,
    };
    let config = load_config(args.config.as_deref())?;

    let response: ClusterResponse = match &args.server {
        Some(url) => {
            let request = ClusterRequest { map_style: Some(style), ..ClusterRequest::inline(tree_document(&tree)) };
            Client::new(url.as_str()).cluster(&request).await?
        }
        None => cluster_response(&tree, style, serde_json::json!({}))?,
    };
    let result = &response.result;

    if let Some(path) = &args.out {
        write(path, &serialize_result_json(result))?;
    }
    if let Some(path) = &args.geojson {
        write(path, &serde_json::to_string_pretty(&response.geojson).expect("JSON values serialize"))?;
    }
    if let Some(path) = &args.html {
        let html = render_html(result, &tree, style, &config.tiles()).map_err(|e| Failure::Validation(e.to_string()))?;
        write(path, &html)?;
    }

    print!("{}", matrix_table(&result.matrix));
    if !result.skipped_classes.is_empty() {
        eprintln!("skipped empty classes: {}", result.skipped_classes.join(", "));
    }
    Ok(())
}

fn parse_location(place: &str) -> Location {
    let coords = place.split_once(',').and_then(|(a, b)| {
        let (lat, lon) = (a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?);
        GeoPoint::new(lat, lon).ok()
    });
    coords.map_or_else(|| Location::Place(place.to_string()), Location::Point)
}

fn apply_backend_flags(config: &mut Config, backend: Option<Backend>, fixtures: Option<&PathBuf>) {
    if let Some(b) = backend {
        config.set(config::PROVIDER_BACKEND, b.as_str());
    }
    if let Some(dir) = fixtures {
        config.set(config::PROVIDER_FIXTURES, dir.display().to_string());
    }
}

pub async fn fetch(args: FetchArgs) -> Result<(), Failure> {
    let spec = QuerySpec {
        location: parse_location(&args.place),
        radius_km: args.radius_km,
        preferences: args.prefs.iter().map(|p| p.trim().to_string()).collect(),
        limit_per_class: args.limit,
        map_style: MapStyle::default(),
    };
    spec.validate().map_err(|e| Failure::Validation(e.to_string()))?;

    let mut config = load_config(args.config.as_deref())?;
    apply_backend_flags(&mut config, args.backend, args.fixtures.as_ref());
    let state = AppState::from_config(&config).map_err(Failure::Validation)?;

    let tree = fetch_tree(state.provider.as_ref(), &spec).await.map_err(|e| match e {
        FetchError::Invalid(v) => Failure::Validation(v.to_string()),
        other => Failure::Provider(other.to_string()),
    })?;
    write(&args.out, &write_tree_csv(&tree))?;

    let width = tree.classes().iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    for class in tree.classes() {
        println!("{:<width$}  {}", class.name, class.nodes.len());
    }
    for name in tree.empty_class_names() {
        eprintln!("warning: no venues found for {name:?}");
    }
    Ok(())
}

async fn shutdown_signal() {
    let interrupt = async {
        tokio::signal::ctrl_c().await.ok();
    };
    #[cfg(unix)]
    {
        let terminate = async {
            match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
                Ok(mut s) => {
                    s.recv().await;
                }
                Err(_) => std::future::pending().await,
            }
        };
        tokio::select! {
            _ = interrupt => {}
            _ = terminate => {}
        }
    }
    #[cfg(not(unix))]
    interrupt.await;
    eprintln!("shutting down");
}

pub async fn serve(args: ServeArgs) -> Result<(), Failure> {
    let mut config = load_config(args.config.as_deref())?;
    apply_backend_flags(&mut config, args.backend, args.fixtures.as_ref());
    if let Some(listen) = &args.listen {
        config.set(config::SERVER_LISTEN, listen.as_str());
    }
    if let Some(dir) = &args.webui_dir {
        config.set(config::WEBUI_DIR, dir.display().to_string());
    }
    let state = AppState::from_config(&config).map_err(Failure::Validation)?;
    let listener = tokio::net::TcpListener::bind(config.listen())
        .await
        .map_err(|e| Failure::Io(format!("cannot listen on {}: {e}", config.listen())))?;
    prefclust_service::run(listener, state, shutdown_signal()).await.map_err(|e| Failure::Io(e.to_string()))
}
