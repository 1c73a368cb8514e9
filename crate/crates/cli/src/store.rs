//! Newline-delimited JSON trajectory store, one trajectory per line:
//! `{"id":"010_00003","user":"010","mode":"bus","points":[[lat,lon,unix_seconds],...]}`.

use std::path::Path;

use chrono::DateTime;
use optg_core::features::{LabeledSignals, Mode};
use optg_core::signals::{DistanceMetric, SignalBundle};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geolife::{GpsPoint, Trajectory};
use crate::io::{read_to_string, write_atomic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredTrajectory {
    pub id: String,
    pub user: String,
    pub mode: Mode,
    /// `(latitude, longitude, unix seconds)`; timestamps are naive and
    /// stored as if UTC.
    pub points: Vec<(f64, f64, i64)>,
}

impl From<&Trajectory> for StoredTrajectory {
    fn from(t: &Trajectory) -> Self {
        Self {
            id: t.id.clone(),
            user: t.user.clone(),
            mode: t.mode,
            points: t
                .points
                .iter()
                .map(|p| (p.latitude, p.longitude, p.time.and_utc().timestamp()))
                .collect(),
        }
    }
}

impl StoredTrajectory {
    pub fn to_trajectory(&self) -> Option<Trajectory> {
        let points = self
            .points
            .iter()
            .map(|&(latitude, longitude, ts)| {
                Some(GpsPoint {
                    latitude,
                    longitude,
                    time: DateTime::from_timestamp(ts, 0)?.naive_utc(),
                })
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Trajectory {
            id: self.id.clone(),
            user: self.user.clone(),
            mode: self.mode,
            points,
        })
    }

    pub fn signals(&self, metric: DistanceMetric) -> Result<LabeledSignals> {
        let coords: Vec<(f64, f64)> = self.points.iter().map(|&(a, b, _)| (a, b)).collect();
        Ok(LabeledSignals {
            id: self.id.clone(),
            mode: self.mode,
            signals: SignalBundle::from_coordinates(&coords, metric)?,
        })
    }
}

pub fn write_store(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    let mut out = String::new();
    for t in trajectories {
        let line = serde_json::to_string(&StoredTrajectory::from(t)).map_err(|e| Error::Json {
            path: path.into(),
            source: e,
        })?;
        out.push_str(&line);
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

pub fn read_store(path: &Path) -> Result<Vec<StoredTrajectory>> {
    if !path.is_file() {
        return Err(Error::Usage(format!(
            "trajectory store {} not found; run `optg ingest` first",
            path.display()
        )));
    }
    read_to_string(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Data(format!("{} line {}: {e}", path.display(), i + 1)))
        })
        .collect()
}
