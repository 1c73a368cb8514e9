//! The std side of the pipeline: GeoLife ingestion and on-disk formats, with
//! the parallel sweep driving `optg-core`.

pub mod config;
pub mod error;
pub mod extract;
pub mod geolife;
pub mod io;
pub mod model;
pub mod report;
pub mod store;
pub mod sweep;

pub use error::{Error, Result};
