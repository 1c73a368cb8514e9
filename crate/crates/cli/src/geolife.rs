//! GeoLife on-disk format: `Data/<user>/Trajectory/*.plt` and
//! `Data/<user>/labels.txt`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use optg_core::features::Mode;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const PLT_HEADER_LINES: usize = 6;
pub const MIN_POINTS: usize = 10;

const PLT_HEADER: &str =
    "Geolife trajectory\nWGS 84\nAltitude is in Feet\nReserved 3\n0,2,255,My Track,0,0,2,8421376\n0\n";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

fn parse_err(line: usize, message: impl Into<String>) -> IngestError {
    IngestError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpsPoint {
    pub latitude: f64,
    pub longitude: f64,
    pub time: NaiveDateTime,
}

fn num(field: &str, line: usize, what: &str) -> Result<f64, IngestError> {
    field
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(line, format!("{what} `{}` is not a number", field.trim())))
}

/// Parses one PLT file. Line numbers in errors are 1-based file lines.
pub fn parse_plt(content: &str) -> Result<Vec<GpsPoint>, IngestError> {
    let mut points = Vec::new();
    for (i, raw) in content.lines().enumerate().skip(PLT_HEADER_LINES) {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let f: Vec<&str> = raw.split(',').collect();
        if f.len() != 7 {
            return Err(parse_err(line, format!("expected 7 fields, found {}", f.len())));
        }
        let latitude = num(f[0], line, "latitude")?;
        let longitude = num(f[1], line, "longitude")?;
        num(f[3], line, "altitude")?;
        num(f[4], line, "serial date")?;
        let date = NaiveDate::parse_from_str(f[5].trim(), "%Y-%m-%d")
            .map_err(|e| parse_err(line, format!("date `{}`: {e}", f[5].trim())))?;
        let time = NaiveTime::parse_from_str(f[6].trim(), "%H:%M:%S")
            .map_err(|e| parse_err(line, format!("time `{}`: {e}", f[6].trim())))?;
        if !(-90.0..=90.0).contains(&latitude) || !(-180.0..=180.0).contains(&longitude) {
            return Err(IngestError::Invalid {
                line,
                message: format!("coordinate ({latitude}, {longitude}) out of range"),
            });
        }
        points.push(GpsPoint {
            latitude,
            longitude,
            time: date.and_time(time),
        });
    }
    Ok(points)
}

/// Renders points as a PLT file with a standard header. Altitude is written
/// as 0; the serial date counts days since 1899-12-30.
pub fn to_plt(points: &[GpsPoint]) -> String {
    let epoch = NaiveDate::from_ymd_opt(1899, 12, 30)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap();
    let mut out = String::from(PLT_HEADER);
    for p in points {
        let days = (p.time - epoch).num_seconds() as f64 / 86_400.0;
        out.push_str(&format!(
            "{},{},0,0,{},{},{}\n",
            p.latitude,
            p.longitude,
            days,
            p.time.format("%Y-%m-%d"),
            p.time.format("%H:%M:%S")
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelInterval {
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
    /// Raw mode string as written in the file.
    pub mode: String,
}

impl LabelInterval {
    pub fn contains(&self, t: NaiveDateTime) -> bool {
        self.start <= t && t <= self.end
    }
}

const LABEL_TIME: &str = "%Y/%m/%d %H:%M:%S";

pub fn parse_labels(content: &str) -> Result<Vec<LabelInterval>, IngestError> {
    let mut out = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || (i == 0 && raw.starts_with("Start Time")) {
            continue;
        }
        let f: Vec<&str> = raw.split('\t').collect();
        if f.len() != 3 {
            return Err(parse_err(
                line,
                format!("expected 3 tab-separated fields, found {}", f.len()),
            ));
        }
        let ts = |s: &str| {
            NaiveDateTime::parse_from_str(s.trim(), LABEL_TIME)
                .map_err(|e| parse_err(line, format!("timestamp `{}`: {e}", s.trim())))
        };
        let (start, end) = (ts(f[0])?, ts(f[1])?);
        if end < start {
            return Err(IngestError::Invalid {
                line,
                message: "interval ends before it starts".into(),
            });
        }
        out.push(LabelInterval {
            start,
            end,
            mode: f[2].trim().to_string(),
        });
    }
    Ok(out)
}

/// Maps raw label strings onto the four classes; everything else is dropped.
pub fn canonical_mode(raw: &str) -> Option<Mode> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "walk" | "walking" => Some(Mode::Walk),
        "bike" => Some(Mode::Bike),
        "bus" => Some(Mode::Bus),
        "car" | "taxi" => Some(Mode::CarTaxi),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: String,
    pub user: String,
    pub mode: Mode,
    pub points: Vec<GpsPoint>,
}

impl Trajectory {
    /// Checks the documented invariants instead of assuming them.
    pub fn validate(&self, interval: Option<&LabelInterval>) -> bool {
        self.points.len() >= MIN_POINTS
            && self.points.windows(2).all(|w| w[0].time <= w[1].time)
            && interval.is_none_or(|iv| {
                canonical_mode(&iv.mode) == Some(self.mode) && self.points.iter().all(|p| iv.contains(p.time))
            })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SegmentStats {
    pub dropped_short: BTreeMap<String, usize>,
    pub dropped_modes: BTreeMap<String, usize>,
    pub unlabeled_points: usize,
}

impl SegmentStats {
    fn merge(&mut self, other: SegmentStats) {
        for (k, v) in other.dropped_short {
            *self.dropped_short.entry(k).or_default() += v;
        }
        for (k, v) in other.dropped_modes {
            *self.dropped_modes.entry(k).or_default() += v;
        }
        self.unlabeled_points += other.unlabeled_points;
    }
}

/// Index over label intervals answering "first interval, in start order,
/// that contains t".
struct IntervalIndex<'a> {
    sorted: Vec<&'a LabelInterval>,
    running_end: Vec<NaiveDateTime>,
}

impl<'a> IntervalIndex<'a> {
    fn new(labels: &'a [LabelInterval]) -> Self {
        let mut sorted: Vec<&LabelInterval> = labels.iter().collect();
        sorted.sort_by_key(|iv| iv.start);
        let mut running_end = Vec::with_capacity(sorted.len());
        for iv in &sorted {
            let prev = running_end.last().copied().unwrap_or(iv.end);
            running_end.push(prev.max(iv.end));
        }
        Self { sorted, running_end }
    }

    fn find(&self, t: NaiveDateTime) -> Option<usize> {
        let lo = self.running_end.partition_point(|&e| e < t);
        let hi = self.sorted.partition_point(|iv| iv.start <= t);
        (lo..hi).find(|&i| self.sorted[i].end >= t)
    }
}

/// Splits one user's time-sorted points into labeled runs.
///
/// A point stays in the current run while the run's interval contains it;
/// otherwise it opens a run in the first interval (by start time) containing
/// it, or is counted as unlabeled. Runs in non-canonical modes or with fewer
/// than [`MIN_POINTS`] points are dropped and counted.
pub fn segment_trajectories(
    user: &str,
    points: &[GpsPoint],
    labels: &[LabelInterval],
) -> (Vec<Trajectory>, SegmentStats) {
    let index = IntervalIndex::new(labels);
    let mut stats = SegmentStats::default();
    let mut runs: Vec<(usize, Vec<GpsPoint>)> = Vec::new();
    let mut current: Option<usize> = None;

    for p in points {
        if let Some(k) = current.filter(|&k| index.sorted[k].contains(p.time)) {
            runs.last_mut().expect("open run").1.push(*p);
            debug_assert_eq!(runs.last().unwrap().0, k);
            continue;
        }
        current = index.find(p.time);
        match current {
            Some(k) => runs.push((k, vec![*p])),
            None => stats.unlabeled_points += 1,
        }
    }

    let mut out = Vec::new();
    for (k, pts) in runs {
        let raw = &index.sorted[k].mode;
        let Some(mode) = canonical_mode(raw) else {
            *stats.dropped_modes.entry(raw.clone()).or_default() += 1;
            continue;
        };
        if pts.len() < MIN_POINTS {
            *stats.dropped_short.entry(mode.to_string()).or_default() += 1;
            continue;
        }
        let t = Trajectory {
            id: format!("{user}_{:05}", out.len()),
            user: user.to_string(),
            mode,
            points: pts,
        };
        debug_assert!(t.validate(Some(index.sorted[k])));
        out.push(t);
    }
    (out, stats)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct UserFailure {
    pub user: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct IngestReport {
    pub users_total: usize,
    pub users_labeled: usize,
    pub users_failed: Vec<UserFailure>,
    pub trajectories: BTreeMap<String, usize>,
    pub total: usize,
    #[serde(flatten)]
    pub segments: SegmentStats,
}

pub struct Ingested {
    pub trajectories: Vec<Trajectory>,
    pub report: IngestReport,
}

/// `root` may be the GeoLife top directory or its `Data` child.
pub fn data_dir(root: &Path) -> PathBuf {
    let nested = root.join("Data");
    if nested.is_dir() {
        nested
    } else {
        root.to_path_buf()
    }
}

type UserData = (Vec<GpsPoint>, Vec<LabelInterval>);
type Segmented = (Vec<Trajectory>, SegmentStats);

fn read_user(dir: &Path) -> Result<Option<UserData>, String> {
    let labels_path = dir.join("labels.txt");
    if !labels_path.is_file() {
        return Ok(None);
    }
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
    let labels = parse_labels(&read(&labels_path)?).map_err(|e| format!("{}: {e}", labels_path.display()))?;

    let mut files: Vec<PathBuf> = match fs::read_dir(dir.join("Trajectory")) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("plt")))
            .collect(),
        Err(_) => Vec::new(),
    };
    files.sort();
    let mut points = Vec::new();
    for f in &files {
        points.extend(parse_plt(&read(f)?).map_err(|e| format!("{}: {e}", f.display()))?);
    }
    points.sort_by_key(|p| p.time);
    Ok(Some((points, labels)))
}

/// Reads every user directory under `root`, in parallel, and segments the
/// labeled ones. Output order is by user id, then time.
pub fn ingest(root: &Path) -> crate::Result<Ingested> {
    let data = data_dir(root);
    let mut users: Vec<(String, PathBuf)> = fs::read_dir(&data)
        .map_err(|e| crate::Error::io(&data, e))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), e.path()))
        .collect();
    users.sort();
    if users.is_empty() {
        return Err(crate::Error::Data(format!("no users found under {}", data.display())));
    }

    let per_user: Vec<(String, Result<Option<Segmented>, String>)> = users
        .par_iter()
        .map(|(user, dir)| {
            let r = read_user(dir).map(|o| o.map(|(pts, labels)| segment_trajectories(user, &pts, &labels)));
            (user.clone(), r)
        })
        .collect();

    let mut report = IngestReport {
        users_total: users.len(),
        ..Default::default()
    };
    let mut trajectories = Vec::new();
    for (user, r) in per_user {
        match r {
            Ok(None) => {}
            Ok(Some((t, stats))) => {
                report.users_labeled += 1;
                report.segments.merge(stats);
                trajectories.extend(t);
            }
            Err(error) => {
                log::warn!("user {user}: {error}");
                report.users_failed.push(UserFailure { user, error });
            }
        }
    }
    if report.users_failed.len() == users.len() {
        return Err(crate::Error::Data("every user failed to parse".into()));
    }
    for m in Mode::ALL {
        report.trajectories.insert(m.to_string(), 0);
    }
    for t in &trajectories {
        *report.trajectories.get_mut(t.mode.as_str()).unwrap() += 1;
    }
    report.total = trajectories.len();
    Ok(Ingested { trajectories, report })
}
