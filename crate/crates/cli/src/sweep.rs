//! Parallel sweep over the grid, with results merged in canonical cell order
//! so the worker count never changes the bytes written.

use std::collections::BTreeMap;
use std::path::Path;

use optg_core::classify::ClassifierKind;
use optg_core::eval::{
    evaluate_fold, format_classes, make_folds, summarize, Cell, FoldPlan, FoldResult, MeanCi, MetricReport,
};
use optg_core::features::{FeatureSpec, LabeledDataset, Mode, SignalSet};
use optg_core::EmbeddingParams;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::extract::{features_path, read_features};
use crate::io::{write_csv, write_json};

pub const RESULTS_HEADER: [&str; 13] = [
    "D",
    "tau",
    "features",
    "signals",
    "classifier",
    "classes",
    "class",
    "precision",
    "sensitivity",
    "f1",
    "accuracy",
    "ci_half_width",
    "seed",
];

pub const OVERALL: &str = "__overall__";

#[derive(Debug)]
pub struct CellOutcome {
    pub cell: Cell,
    pub result: std::result::Result<MetricReport, String>,
}

/// Cells sharing a dataset projection and a fold plan.
struct Prepared {
    dataset: LabeledDataset,
    plan: FoldPlan,
}

type GroupKey = (EmbeddingParams, Vec<Mode>, SignalSet, optg_core::features::FeatureSet);

fn key(cell: &Cell) -> GroupKey {
    (
        cell.spec.params,
        cell.classes.clone(),
        cell.spec.signals,
        cell.spec.features,
    )
}

type Planned = std::result::Result<(LabeledDataset, FoldPlan), String>;

pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<CellOutcome>> {
    let grid = cfg.grid.to_grid();
    let cells = grid.cells()?;
    let dir = cfg.features_dir();

    let mut full: BTreeMap<EmbeddingParams, LabeledDataset> = BTreeMap::new();
    for params in grid.embeddings()? {
        full.insert(params, read_features(&features_path(&dir, params), params)?);
    }

    // one fold plan per (embedding, class subset), reused by every
    // classifier and feature set
    let mut plans: BTreeMap<(EmbeddingParams, Vec<Mode>), Planned> = BTreeMap::new();
    for (params, ds) in &full {
        for classes in &grid.class_subsets {
            let r = ds
                .subset_classes(classes)
                .and_then(|sub| make_folds(&sub, cfg.seed).map(|p| (sub, p)))
                .map_err(|e| e.to_string());
            plans.insert((*params, classes.clone()), r);
        }
    }

    let mut groups: BTreeMap<GroupKey, std::result::Result<Prepared, String>> = BTreeMap::new();
    for cell in &cells {
        groups.entry(key(cell)).or_insert_with(|| {
            let (sub, plan) = plans[&(cell.spec.params, cell.classes.clone())].clone()?;
            let dataset = sub.project(cell.spec).map_err(|e| e.to_string())?;
            Ok(Prepared { dataset, plan })
        });
    }

    let jobs: Vec<(usize, usize)> = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| groups[&key(c)].is_ok())
        .flat_map(|(i, _)| (0..optg_core::eval::FOLDS).map(move |f| (i, f)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start {} workers: {e}", cfg.jobs)))?;
    let fold_results: Vec<((usize, usize), std::result::Result<FoldResult, String>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, f)| {
                let cell = &cells[i];
                let p = groups[&key(cell)].as_ref().expect("filtered above");
                let config = cfg.classifier.config(cell.classifier);
                (
                    (i, f),
                    evaluate_fold(&p.dataset, &config, &p.plan, f).map_err(|e| e.to_string()),
                )
            })
            .collect()
    });

    let mut per_cell: Vec<Vec<std::result::Result<FoldResult, String>>> =
        (0..cells.len()).map(|_| Vec::new()).collect();
    for ((i, _), r) in fold_results {
        per_cell[i].push(r);
    }

    let mut out = Vec::with_capacity(cells.len());
    for (i, cell) in cells.into_iter().enumerate() {
        let result = match &groups[&key(&cell)] {
            Err(e) => Err(e.clone()),
            Ok(p) => std::mem::take(&mut per_cell[i])
                .into_iter()
                .collect::<std::result::Result<Vec<_>, String>>()
                .and_then(|folds| {
                    summarize(&p.dataset, &cfg.classifier.config(cell.classifier), &p.plan, folds)
                        .map_err(|e| e.to_string())
                }),
        };
        if let Err(e) = &result {
            log::warn!("{}: {e}", describe(&cell));
        }
        out.push(CellOutcome { cell, result });
    }
    Ok(out)
}

fn describe(cell: &Cell) -> String {
    format!(
        "D={} tau={} {} {} {} {}",
        cell.spec.params.dimension(),
        cell.spec.params.delay(),
        cell.spec.features,
        cell.spec.signals,
        cell.classifier,
        format_classes(&cell.classes)
    )
}

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

fn cell_prefix(spec: &FeatureSpec, classifier: ClassifierKind, classes: &[Mode]) -> Vec<String> {
    vec![
        spec.params.dimension().to_string(),
        spec.params.delay().to_string(),
        spec.features.to_string(),
        spec.signals.to_string(),
        classifier.to_string(),
        format_classes(classes),
    ]
}

/// CSV rows: one per class (F1 half-width), then the overall accuracy row.
pub fn report_rows(r: &MetricReport) -> Vec<Vec<String>> {
    let prefix = cell_prefix(&r.spec, r.classifier, &r.classes);
    let mut rows = Vec::new();
    for c in &r.per_class {
        let mut row = prefix.clone();
        row.extend([
            c.mode.to_string(),
            f6(c.precision.mean),
            f6(c.sensitivity.mean),
            f6(c.f1.mean),
            String::new(),
            f6(c.f1.half_width),
            r.seed.to_string(),
        ]);
        rows.push(row);
    }
    let mut row = prefix;
    row.extend([
        OVERALL.to_string(),
        String::new(),
        String::new(),
        String::new(),
        f6(r.accuracy.mean),
        f6(r.accuracy.half_width),
        r.seed.to_string(),
    ]);
    rows.push(row);
    rows
}

#[derive(Serialize)]
struct JsonMetric {
    mean: f64,
    half_width: f64,
}

impl From<MeanCi> for JsonMetric {
    fn from(m: MeanCi) -> Self {
        Self {
            mean: m.mean,
            half_width: m.half_width,
        }
    }
}

#[derive(Serialize)]
struct JsonClass {
    class: Mode,
    precision: JsonMetric,
    sensitivity: JsonMetric,
    f1: JsonMetric,
}

#[derive(Serialize)]
struct JsonFold {
    fold: usize,
    train_size: usize,
    /// `[actual][predicted]`
    confusion: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct JsonCell {
    #[serde(rename = "D")]
    dimension: usize,
    tau: usize,
    features: String,
    signals: String,
    classifier: String,
    classes: String,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accuracy: Option<JsonMetric>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    per_class: Vec<JsonClass>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    folds: Vec<JsonFold>,
}

fn json_cell(o: &CellOutcome, seed: u64) -> JsonCell {
    let c = &o.cell;
    let mut j = JsonCell {
        dimension: c.spec.params.dimension(),
        tau: c.spec.params.delay(),
        features: c.spec.features.to_string(),
        signals: c.spec.signals.to_string(),
        classifier: c.classifier.to_string(),
        classes: format_classes(&c.classes),
        seed,
        error: None,
        accuracy: None,
        per_class: Vec::new(),
        folds: Vec::new(),
    };
    match &o.result {
        Err(e) => j.error = Some(e.clone()),
        Ok(r) => {
            j.accuracy = Some(r.accuracy.into());
            j.per_class = r
                .per_class
                .iter()
                .map(|m| JsonClass {
                    class: m.mode,
                    precision: m.precision.into(),
                    sensitivity: m.sensitivity.into(),
                    f1: m.f1.into(),
                })
                .collect();
            j.folds = r
                .folds
                .iter()
                .map(|f| {
                    let n = f.confusion.n_classes();
                    JsonFold {
                        fold: f.fold,
                        train_size: f.train_size,
                        confusion: (0..n)
                            .map(|a| (0..n).map(|p| f.confusion.get(a, p)).collect())
                            .collect(),
                    }
                })
                .collect();
        }
    }
    j
}

pub fn write_results(out: &Path, outcomes: &[CellOutcome], seed: u64) -> Result<()> {
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .filter_map(|o| o.result.as_ref().ok())
        .flat_map(report_rows)
        .collect();
    write_csv(&out.join("results.csv"), &RESULTS_HEADER, rows)?;
    let cells: Vec<JsonCell> = outcomes.iter().map(|o| json_cell(o, seed)).collect();
    write_json(&out.join("results.json"), &cells)
}

/// Best accuracy per class subset, as a plain-text table.
pub fn summary_table(outcomes: &[CellOutcome], top: usize) -> String {
    let mut by_classes: BTreeMap<Vec<Mode>, Vec<&MetricReport>> = BTreeMap::new();
    for r in outcomes.iter().filter_map(|o| o.result.as_ref().ok()) {
        by_classes.entry(r.classes.clone()).or_default().push(r);
    }
    let mut s = String::new();
    for (classes, mut reports) in by_classes {
        reports.sort_by(|a, b| b.accuracy.mean.total_cmp(&a.accuracy.mean));
        s.push_str(&format!("classes {}\n", format_classes(&classes)));
        s.push_str(&format!(
            "  {:>2} {:>3}  {:<8} {:<13} {:<10} {:>9}\n",
            "D", "tau", "features", "signals", "classifier", "accuracy"
        ));
        for r in reports.into_iter().take(top) {
            s.push_str(&format!(
                "  {:>2} {:>3}  {:<8} {:<13} {:<10} {:>6.2}% ± {:.2}\n",
                r.spec.params.dimension(),
                r.spec.params.delay(),
                r.spec.features.to_string(),
                r.spec.signals.to_string(),
                r.classifier.to_string(),
                100.0 * r.accuracy.mean,
                100.0 * r.accuracy.half_width
            ));
        }
    }
    s
}
