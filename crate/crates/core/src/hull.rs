//! Boundary polygon around the selected points.
//!
//! Andrew's monotone chain over (lon, lat) treated as planar coordinates.
//! At city scale the planar error is negligible; the hull is not geodesic.

use crate::geo::GeoPoint;

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull as a closed counter-clockwise ring (first vertex repeated
/// last). `None` for fewer than three distinct points or collinear input.
pub fn boundary_hull(points: &[GeoPoint]) -> Option<Vec<GeoPoint>> {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p.lon(), p.lat())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return None;
    }

    let mut lower: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return None;
    }

    let mut ring: Vec<GeoPoint> = lower
        .into_iter()
        .map(|(lon, lat)| GeoPoint::new(lat, lon).expect("hull vertices come from valid points"))
        .collect();
    ring.push(ring[0]);
    Some(ring)
}
