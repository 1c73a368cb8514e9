//! The three per-trajectory signals: latitude, longitude and step distance.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::ordinal::TimeSeries;

/// Mean Earth radius in meters, used by the haversine metric.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// A signal derived from a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Signal {
    Latitude,
    Longitude,
    Distance,
}

impl Signal {
    /// Canonical order.
    pub const ALL: [Signal; 3] = [Signal::Latitude, Signal::Longitude, Signal::Distance];

    /// Short column prefix.
    pub fn short_name(self) -> &'static str {
        match self {
            Signal::Latitude => "lat",
            Signal::Longitude => "lon",
            Signal::Distance => "dist",
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Signal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lat" | "latitude" => Ok(Signal::Latitude),
            "lon" | "lng" | "longitude" => Ok(Signal::Longitude),
            "dist" | "distance" => Ok(Signal::Distance),
            other => Err(invalid(alloc::format!("unknown signal `{other}`"))),
        }
    }
}

/// How the step distance between consecutive fixes is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DistanceMetric {
    /// Plain Euclidean distance on (latitude, longitude) in degrees.
    #[default]
    Euclidean,
    /// Great-circle distance in meters.
    Haversine,
}

impl DistanceMetric {
    pub fn distance(self, a: (f64, f64), b: (f64, f64)) -> f64 {
        match self {
            DistanceMetric::Euclidean => libm::hypot(b.0 - a.0, b.1 - a.1),
            DistanceMetric::Haversine => haversine_m(a, b),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMetric::Euclidean => "euclidean",
            DistanceMetric::Haversine => "haversine",
        }
    }
}

impl fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" => Ok(DistanceMetric::Euclidean),
            "haversine" => Ok(DistanceMetric::Haversine),
            other => Err(invalid(alloc::format!("unknown distance metric `{other}`"))),
        }
    }
}

fn haversine_m(a: (f64, f64), b: (f64, f64)) -> f64 {
    let to_rad = core::f64::consts::PI / 180.0;
    let (lat1, lat2) = (a.0 * to_rad, b.0 * to_rad);
    let dlat = lat2 - lat1;
    let dlon = (b.1 - a.1) * to_rad;
    let s = libm::sin(dlat / 2.0);
    let t = libm::sin(dlon / 2.0);
    let h = s * s + libm::cos(lat1) * libm::cos(lat2) * t * t;
    2.0 * EARTH_RADIUS_M * libm::asin(libm::sqrt(h.min(1.0)))
}

/// Latitude, longitude and step-distance series of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalBundle {
    latitude: TimeSeries,
    longitude: TimeSeries,
    distance: Option<TimeSeries>,
}

impl SignalBundle {
    /// Derives the bundle from `(latitude, longitude)` fixes in time order.
    /// The distance series has one sample fewer than there are fixes and is
    /// absent for a single fix.
    pub fn from_coordinates(points: &[(f64, f64)], metric: DistanceMetric) -> Result<Self> {
        let latitude = TimeSeries::new(points.iter().map(|p| p.0).collect())?;
        let longitude = TimeSeries::new(points.iter().map(|p| p.1).collect())?;
        let steps: Vec<f64> = points.windows(2).map(|w| metric.distance(w[0], w[1])).collect();
        let distance = if steps.is_empty() {
            None
        } else {
            Some(TimeSeries::new(steps)?)
        };
        Ok(Self {
            latitude,
            longitude,
            distance,
        })
    }

    pub fn latitude(&self) -> &TimeSeries {
        &self.latitude
    }

    pub fn longitude(&self) -> &TimeSeries {
        &self.longitude
    }

    pub fn distance(&self) -> Option<&TimeSeries> {
        self.distance.as_ref()
    }

    pub fn get(&self, signal: Signal) -> Option<&TimeSeries> {
        match signal {
            Signal::Latitude => Some(&self.latitude),
            Signal::Longitude => Some(&self.longitude),
            Signal::Distance => self.distance.as_ref(),
        }
    }

    /// Length of a signal; 0 for an absent distance series.
    pub fn len_of(&self, signal: Signal) -> usize {
        self.get(signal).map_or(0, TimeSeries::len)
    }
}
