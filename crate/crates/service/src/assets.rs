//! Static files for the browser front end, served under `/ui/`.

use std::path::{Path, PathBuf};

use axum::http::{header, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use percent_encoding::percent_decode_str;

use crate::error::ApiError;

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("html" | "htm") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript; charset=utf-8",
        Some("css") => "text/css; charset=utf-8",
        Some("json" | "map") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        Some("jpg" | "jpeg") => "image/jpeg",
        Some("ico") => "image/x-icon",
        Some("woff2") => "font/woff2",
        Some("woff") => "font/woff",
        Some("txt") => "text/plain; charset=utf-8",
        _ => "application/octet-stream",
    }
}

/// Maps the part of the URI after `/ui/` to a relative file path. Any `..`
/// segment, raw or percent-encoded, is refused rather than resolved.
pub fn relative_path(uri: &Uri) -> Result<PathBuf, ApiError> {
    let rest = uri.path().strip_prefix("/ui").unwrap_or_default();
    let decoded = percent_decode_str(rest)
        .decode_utf8()
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "bad_path", "path is not valid UTF-8"))?;
    let mut out = PathBuf::new();
    for segment in decoded.split(['/', '\\']) {
        match segment {
            "" | "." => {}
            ".." => return Err(ApiError::new(StatusCode::BAD_REQUEST, "bad_path", "path traversal rejected")),
            s if s.contains('\0') || s.contains(':') => {
                return Err(ApiError::new(StatusCode::BAD_REQUEST, "bad_path", "invalid path segment"))
            }
            s => out.push(s),
        }
    }
    if out.as_os_str().is_empty() {
        out.push("index.html");
    }
    Ok(out)
}

pub async fn serve(dir: &Path, uri: &Uri) -> Result<Response, ApiError> {
    let rel = relative_path(uri)?;
    if !dir.join("index.html").is_file() {
        return Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("webui not built: no index.html in {} (build the webui bundle first)", dir.display()),
        ));
    }
    let path = dir.join(&rel);
    match tokio::fs::read(&path).await {
        Ok(bytes) => Ok(([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response()),
        Err(_) => Err(ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no such asset: {}", rel.display()))),
    }
}
