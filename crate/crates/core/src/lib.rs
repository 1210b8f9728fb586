//! Greedy one-node-per-class geospatial clustering.
//!
//! Given classes of named points (restaurants, parks, ...), [`engine::jjcluster`]
//! picks one point per class so the picks sit close together, records an
//! optimization matrix for every step, and wraps the picks in a boundary
//! polygon. Around it sit tree parsers, a points-of-interest provider
//! interface, and map rendering.

pub mod config;
pub mod data_io;
pub mod engine;
pub mod example;
pub mod geo;
pub mod hull;
pub mod metric;
pub mod oracle;
pub mod provider;
pub mod render;
pub mod tree;
pub mod wire;

pub use engine::{candidate_scores, jjcluster, optimization_matrix, predicted_distance_evals, ClusterResult, EngineError, MatrixRow};
pub use geo::{haversine_km, validate_point, GeoError, GeoPoint, Kilometers, EARTH_RADIUS_KM};
pub use hull::boundary_hull;
pub use metric::{Haversine, Metric};
pub use tree::{Node, PreferenceClass, PreferenceTree, TreeError};
