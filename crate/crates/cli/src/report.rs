//! Plot-ready tables derived from `results.csv` and the feature matrices.

use std::fs;
use std::path::{Path, PathBuf};

use optg_core::graph::build_graph;
use optg_core::ordinal::extract_sequence;
use optg_core::signals::{DistanceMetric, Signal};
use optg_core::EmbeddingParams;

use crate::error::{Error, Result};
use crate::extract::{parse_features_name, read_features};
use crate::io::{read_to_string, write_csv};
use crate::store::StoredTrajectory;
use crate::sweep::{OVERALL, RESULTS_HEADER};

#[derive(Debug, Clone, PartialEq)]
pub struct OverallRow {
    pub dimension: usize,
    pub tau: usize,
    pub features: String,
    pub signals: String,
    pub classifier: String,
    pub classes: String,
    pub accuracy: String,
    pub half_width: String,
}

pub fn read_overall(path: &Path) -> Result<Vec<OverallRow>> {
    if !path.is_file() {
        return Err(Error::Usage(format!(
            "results file {} not found; run `optg evaluate` first",
            path.display()
        )));
    }
    let text = read_to_string(path)?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let csv_err = |e| Error::Csv {
        path: path.into(),
        source: e,
    };
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(RESULTS_HEADER.iter().copied()) {
        return Err(Error::Data(format!("{}: unexpected header", path.display())));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if &rec[6] != OVERALL {
            continue;
        }
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Data(format!("{} line {}: `{s}` is not an integer", path.display(), i + 2)))
        };
        out.push(OverallRow {
            dimension: int(&rec[0])?,
            tau: int(&rec[1])?,
            features: rec[2].to_string(),
            signals: rec[3].to_string(),
            classifier: rec[4].to_string(),
            classes: rec[5].to_string(),
            accuracy: rec[10].to_string(),
            half_width: rec[11].to_string(),
        });
    }
    Ok(out)
}

const BY_D: [&str; 8] = [
    "classes",
    "signals",
    "features",
    "classifier",
    "tau",
    "D",
    "accuracy",
    "ci_half_width",
];

fn group_key(r: &OverallRow) -> (String, String, String, String) {
    (
        r.classes.clone(),
        r.signals.clone(),
        r.features.clone(),
        r.classifier.clone(),
    )
}

fn row(r: &OverallRow) -> Vec<String> {
    vec![
        r.classes.clone(),
        r.signals.clone(),
        r.features.clone(),
        r.classifier.clone(),
        r.tau.to_string(),
        r.dimension.to_string(),
        r.accuracy.clone(),
        r.half_width.clone(),
    ]
}

/// Accuracy against D at the smallest τ in the results.
pub fn accuracy_by_d(rows: &[OverallRow]) -> Vec<Vec<String>> {
    let Some(tau) = rows.iter().map(|r| r.tau).min() else {
        return Vec::new();
    };
    let mut sel: Vec<&OverallRow> = rows.iter().filter(|r| r.tau == tau).collect();
    sel.sort_by(|a, b| group_key(a).cmp(&group_key(b)).then(a.dimension.cmp(&b.dimension)));
    sel.into_iter().map(row).collect()
}

/// Accuracy against τ at a fixed D.
pub fn accuracy_by_tau(rows: &[OverallRow], dimension: usize) -> Vec<Vec<String>> {
    let mut sel: Vec<&OverallRow> = rows.iter().filter(|r| r.dimension == dimension).collect();
    sel.sort_by(|a, b| group_key(a).cmp(&group_key(b)).then(a.tau.cmp(&b.tau)));
    sel.into_iter().map(row).collect()
}

/// `(H, C)` per trajectory and signal from every feature matrix in `dir`.
pub fn complexity_entropy(dir: &Path) -> Result<Vec<Vec<String>>> {
    let mut files: Vec<_> = match fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().to_string_lossy().into_owned();
                parse_features_name(&name).map(|p| (p, e.path()))
            })
            .collect(),
        Err(_) => Vec::new(),
    };
    files.sort_by_key(|(p, _)| *p);
    let mut out = Vec::new();
    for (params, path) in files {
        let ds = read_features(&path, params)?;
        let names = ds.spec().column_names();
        for r in ds.rows() {
            for s in ds.spec().signals.iter() {
                let col = |f: &str| names.iter().position(|n| *n == format!("{}_{f}", s.short_name()));
                let (Some(h), Some(c)) = (col("H"), col("C")) else {
                    continue;
                };
                out.push(vec![
                    params.dimension().to_string(),
                    params.delay().to_string(),
                    r.id.clone(),
                    r.mode.to_string(),
                    s.short_name().to_string(),
                    r.values[h].to_string(),
                    r.values[c].to_string(),
                ]);
            }
        }
    }
    Ok(out)
}

/// Writes the three plot tables under `plots`.
pub fn run_report(results: &Path, features_dir: &Path, plots: &Path, fixed_dimension: usize) -> Result<()> {
    let rows = read_overall(results)?;
    write_csv(&plots.join("accuracy_by_d.csv"), &BY_D, accuracy_by_d(&rows))?;
    write_csv(
        &plots.join("accuracy_by_tau.csv"),
        &BY_D,
        accuracy_by_tau(&rows, fixed_dimension),
    )?;
    write_csv(
        &plots.join("complexity_entropy.csv"),
        &["D", "tau", "traj_id", "mode", "signal", "H", "C"],
        complexity_entropy(features_dir)?,
    )
}

pub const EDGE_HEADER: [&str; 3] = ["src_index", "dst_index", "weight"];

/// Writes the transition graph of every signal of each requested trajectory
/// as `graph_{id}_{signal}_D{D}_tau{tau}.csv`. Returns the files written.
pub fn export_graphs(
    store: &[StoredTrajectory],
    ids: &[String],
    params: EmbeddingParams,
    metric: DistanceMetric,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for id in ids {
        let t = store
            .iter()
            .find(|t| &t.id == id)
            .ok_or_else(|| Error::Usage(format!("no trajectory `{id}` in the store")))?;
        let bundle = t.signals(metric)?.signals;
        for signal in Signal::ALL {
            let series = bundle.get(signal).expect("bundle holds every signal");
            let graph = extract_sequence(series, params)
                .and_then(|seq| build_graph(&seq))
                .map_err(|e| Error::Data(format!("{id} {}: {e}", signal.short_name())))?;
            let path = dir.join(format!(
                "graph_{id}_{}_D{}_tau{}.csv",
                signal.short_name(),
                params.dimension(),
                params.delay()
            ));
            let rows = graph
                .edges()
                .map(|e| vec![e.source.to_string(), e.target.to_string(), e.weight.to_string()]);
            write_csv(&path, &EDGE_HEADER, rows)?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overall(d: usize, tau: usize, features: &str, classifier: &str) -> OverallRow {
        OverallRow {
            dimension: d,
            tau,
            features: features.into(),
            signals: "lat+lon+dist".into(),
            classifier: classifier.into(),
            classes: "walk+bike+bus+car_taxi".into(),
            accuracy: "0.5".into(),
            half_width: "0.01".into(),
        }
    }

    #[test]
    fn by_d_cardinality() {
        let mut rows = Vec::new();
        for d in 3..=7 {
            for c in ["knn", "tree"] {
                for f in ["H", "PST"] {
                    rows.push(overall(d, 1, f, c));
                    rows.push(overall(d, 2, f, c));
                }
            }
        }
        let t = accuracy_by_d(&rows);
        assert_eq!(t.iter().filter(|r| r[2] == "H").count(), 10);
        assert!(t.iter().all(|r| r[4] == "1"));
        assert_eq!(accuracy_by_tau(&rows, 5).len(), 8);
    }

    #[test]
    fn empty_results_give_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let results = dir.path().join("results.csv");
        write_csv(&results, &RESULTS_HEADER, Vec::<Vec<String>>::new()).unwrap();
        run_report(&results, &dir.path().join("features"), &dir.path().join("plots"), 5).unwrap();
        let by_d = fs::read_to_string(dir.path().join("plots/accuracy_by_d.csv")).unwrap();
        assert_eq!(
            by_d,
            "classes,signals,features,classifier,tau,D,accuracy,ci_half_width\n"
        );
        let ce = fs::read_to_string(dir.path().join("plots/complexity_entropy.csv")).unwrap();
        assert_eq!(ce.lines().count(), 1);
    }

    #[test]
    fn malformed_results_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let results = dir.path().join("results.csv");
        fs::write(&results, "a,b\n1,2\n").unwrap();
        assert!(read_overall(&results).is_err());
    }
}
