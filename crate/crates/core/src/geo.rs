//! Validated coordinates and great-circle distance.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mean Earth radius used by every distance in this crate.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Half the great circle; the largest distance [`haversine_km`] can return.
pub const HALF_CIRCUMFERENCE_KM: f64 = std::f64::consts::PI * EARTH_RADIUS_KM;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordField {
    Lat,
    Lon,
}

impl fmt::Display for CoordField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordField::Lat => f.write_str("lat"),
            CoordField::Lon => f.write_str("lon"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("{field} out of range: {value}")]
    OutOfRange { field: CoordField, value: f64 },
}

/// A latitude/longitude pair in degrees. Always within range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    lat: f64,
    lon: f64,
}

impl TryFrom<RawPoint> for GeoPoint {
    type Error = GeoError;

    fn try_from(raw: RawPoint) -> Result<Self, Self::Error> {
        GeoPoint::new(raw.lat, raw.lon)
    }
}

impl From<GeoPoint> for RawPoint {
    fn from(p: GeoPoint) -> Self {
        RawPoint { lat: p.lat, lon: p.lon }
    }
}

impl GeoPoint {
    /// Rejects (never clamps) values outside [-90, 90] x [-180, 180]. NaN is out of range.
    pub fn new(lat: f64, lon: f64) -> Result<Self, GeoError> {
        if !(-90.0..=90.0).contains(&lat) {
            return Err(GeoError::OutOfRange { field: CoordField::Lat, value: lat });
        }
        if !(-180.0..=180.0).contains(&lon) {
            return Err(GeoError::OutOfRange { field: CoordField::Lon, value: lon });
        }
        Ok(GeoPoint { lat, lon })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }
}

impl fmt::Display for GeoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lat, self.lon)
    }
}

pub fn validate_point(lat: f64, lon: f64) -> Result<GeoPoint, GeoError> {
    GeoPoint::new(lat, lon)
}

/// A great-circle distance, `0 <= km <= HALF_CIRCUMFERENCE_KM`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Kilometers(f64);

impl Kilometers {
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Kilometers> for f64 {
    fn from(k: Kilometers) -> f64 {
        k.0
    }
}

/// Haversine distance on a sphere of radius [`EARTH_RADIUS_KM`].
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> Kilometers {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();

    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    // h can drift a hair past 1 for near-antipodal pairs
    let central = 2.0 * h.clamp(0.0, 1.0).sqrt().asin();
    Kilometers((EARTH_RADIUS_KM * central).min(HALF_CIRCUMFERENCE_KM))
}
