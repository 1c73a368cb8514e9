//! Feature matrices, one CSV per embedding: `features_D{D}_tau{tau}.csv`
//! with columns `traj_id,mode,lat_H,lat_C,lat_PST,...` and a skip report beside it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use optg_core::features::{
    extract_features, Extraction, FeatureSet, FeatureSpec, FeatureVector, LabeledDataset, Mode, SignalSet, Skip,
};
use optg_core::signals::{DistanceMetric, Signal};
use optg_core::EmbeddingParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_to_string, write_csv, write_json};
use crate::store::StoredTrajectory;

pub fn features_path(dir: &Path, params: EmbeddingParams) -> PathBuf {
    dir.join(format!("features_D{}_tau{}.csv", params.dimension(), params.delay()))
}

pub fn skips_path(dir: &Path, params: EmbeddingParams) -> PathBuf {
    dir.join(format!(
        "features_D{}_tau{}_skips.json",
        params.dimension(),
        params.delay()
    ))
}

/// Embedding encoded in a feature file name, if it is one.
pub fn parse_features_name(name: &str) -> Option<EmbeddingParams> {
    let rest = name.strip_prefix("features_D")?.strip_suffix(".csv")?;
    let (d, t) = rest.split_once("_tau")?;
    EmbeddingParams::new(d.parse().ok()?, t.parse().ok()?).ok()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SkipEntry {
    pub id: String,
    pub mode: Mode,
    pub signal: String,
    pub len: usize,
    pub required: usize,
}

impl From<&Skip> for SkipEntry {
    fn from(s: &Skip) -> Self {
        Self {
            id: s.id.clone(),
            mode: s.mode,
            signal: s.signal.short_name().to_string(),
            len: s.len,
            required: s.required,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SkipFile {
    #[serde(rename = "D")]
    pub dimension: usize,
    pub tau: usize,
    pub required_len: usize,
    pub total: usize,
    pub kept: usize,
    pub skipped: usize,
    pub skipped_by_mode: BTreeMap<String, usize>,
    pub items: Vec<SkipEntry>,
}

/// Vectors and skips for one embedding, in store order.
pub fn extract_embedding(
    items: &[optg_core::features::LabeledSignals],
    spec: &FeatureSpec,
) -> (Vec<FeatureVector>, Vec<Skip>) {
    let results: Vec<Extraction> = items.par_iter().map(|it| extract_features(it, spec)).collect();
    let mut rows = Vec::new();
    let mut skips = Vec::new();
    for r in results {
        match r {
            Extraction::Vector(v) => rows.push(v),
            Extraction::Skipped(s) => skips.push(s),
        }
    }
    (rows, skips)
}

pub fn write_features(path: &Path, spec: &FeatureSpec, rows: &[FeatureVector]) -> Result<()> {
    let names = spec.column_names();
    let mut header = vec!["traj_id", "mode"];
    header.extend(names.iter().map(String::as_str));
    write_csv(
        path,
        &header,
        rows.iter().map(|r| {
            let mut rec = vec![r.id.clone(), r.mode.to_string()];
            // shortest representation that parses back to the same f64
            rec.extend(r.values.iter().map(|v| v.to_string()));
            rec
        }),
    )
}

/// Reads a feature file, recovering the signal selection from its header.
/// All three features must be present.
pub fn read_features(path: &Path, params: EmbeddingParams) -> Result<LabeledDataset> {
    if !path.is_file() {
        return Err(Error::Usage(format!(
            "feature matrix {} not found; run `optg extract` first",
            path.display()
        )));
    }
    let text = read_to_string(path)?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let csv_err = |e| Error::Csv {
        path: path.into(),
        source: e,
    };
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let bad = |m: String| Error::Data(format!("{}: {m}", path.display()));
    if header.len() < 3 || header[0] != "traj_id" || header[1] != "mode" {
        return Err(bad("header must start with `traj_id,mode`".into()));
    }
    let signals = header[2..]
        .iter()
        .map(|c| {
            let (prefix, _) = c.split_once('_').ok_or_else(|| bad(format!("bad column `{c}`")))?;
            prefix.parse::<Signal>().map_err(|e| bad(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let signals = SignalSet::new(&signals).map_err(|e| bad(e.to_string()))?;
    let spec = FeatureSpec::new(params, FeatureSet::H_C_PST, signals);
    if header[2..] != spec.column_names()[..] {
        return Err(bad(format!("unexpected columns {:?}", &header[2..])));
    }

    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        let mode: Mode = rec[1].parse().map_err(|e| bad(format!("line {line}: {e}")))?;
        let values = rec
            .iter()
            .skip(2)
            .map(|v| v.parse::<f64>().map_err(|e| bad(format!("line {line}: `{v}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(FeatureVector {
            id: rec[0].to_string(),
            mode,
            values,
        });
    }
    Ok(LabeledDataset::new(spec, rows)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractSummary {
    pub params: EmbeddingParams,
    pub kept: usize,
    pub skipped: usize,
}

/// Extracts every embedding of the grid with all three features over
/// `signals`, writing one matrix and one skip report per embedding.
pub fn run_extract(
    store: &[StoredTrajectory],
    embeddings: &[EmbeddingParams],
    signals: SignalSet,
    metric: DistanceMetric,
    dir: &Path,
) -> Result<Vec<ExtractSummary>> {
    let items = store
        .par_iter()
        .map(|t| t.signals(metric))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for &params in embeddings {
        let spec = FeatureSpec::new(params, FeatureSet::H_C_PST, signals);
        let (rows, skips) = extract_embedding(&items, &spec);
        if rows.is_empty() {
            log::warn!(
                "D={} tau={}: every trajectory is shorter than {} samples",
                params.dimension(),
                params.delay(),
                spec.min_signal_len()
            );
        }
        write_features(&features_path(dir, params), &spec, &rows)?;
        let mut by_mode = BTreeMap::new();
        for s in &skips {
            *by_mode.entry(s.mode.to_string()).or_insert(0) += 1;
        }
        write_json(
            &skips_path(dir, params),
            &SkipFile {
                dimension: params.dimension(),
                tau: params.delay(),
                required_len: spec.min_signal_len(),
                total: items.len(),
                kept: rows.len(),
                skipped: skips.len(),
                skipped_by_mode: by_mode,
                items: skips.iter().map(SkipEntry::from).collect(),
            },
        )?;
        out.push(ExtractSummary {
            params,
            kept: rows.len(),
            skipped: skips.len(),
        });
    }
    Ok(out)
}
