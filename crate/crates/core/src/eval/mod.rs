//! Stratified cross-validation, per-class metrics and sweep grids.

use alloc::vec::Vec;

use crate::classify::{train, ClassifierConfig, ClassifierKind};
use crate::error::{invalid, Result};
use crate::features::{FeatureSpec, LabeledDataset, Mode};

mod folds;
mod grid;
mod metrics;

pub use folds::{make_folds, FoldPlan, FOLDS};
pub use grid::{format_classes, parse_classes, Cell, Grid};
pub use metrics::{t_quantile_975, ConfusionMatrix, MeanCi};

/// Outcome of training on four folds and testing on the fifth.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassMetrics {
    pub mode: Mode,
    pub precision: MeanCi,
    pub sensitivity: MeanCi,
    pub f1: MeanCi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub classifier: ClassifierKind,
    pub spec: FeatureSpec,
    pub classes: Vec<Mode>,
    pub seed: u64,
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: MeanCi,
    pub folds: Vec<FoldResult>,
}

/// Trains on every fold but `fold` and scores the held-out rows.
pub fn evaluate_fold(
    dataset: &LabeledDataset,
    config: &ClassifierConfig,
    plan: &FoldPlan,
    fold: usize,
) -> Result<FoldResult> {
    if !plan.matches(dataset) {
        return Err(invalid("fold plan was made for a different dataset"));
    }
    let n_classes = dataset.classes().len();
    let labels = dataset.labels();
    let x = dataset.matrix();

    let train_idx = plan.train_indices(fold);
    let test_idx = plan.test_indices(fold);
    let y_train: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
    for c in 0..n_classes {
        if !y_train.contains(&c) {
            return Err(invalid(alloc::format!(
                "training split of fold {fold} lacks class `{}`",
                dataset.classes()[c]
            )));
        }
    }

    let model = train(config, &x.select(&train_idx), &y_train, n_classes)?;
    let predicted = model.predict_all(&x.select(&test_idx))?;
    let actual: Vec<usize> = test_idx.iter().map(|&i| labels[i]).collect();
    Ok(FoldResult {
        fold,
        train_size: train_idx.len(),
        confusion: ConfusionMatrix::from_predictions(n_classes, &actual, &predicted)?,
    })
}

/// Aggregates fold results into means and 95% half-widths.
pub fn summarize(
    dataset: &LabeledDataset,
    config: &ClassifierConfig,
    plan: &FoldPlan,
    mut folds: Vec<FoldResult>,
) -> Result<MetricReport> {
    folds.sort_by_key(|f| f.fold);
    let over = |f: &dyn Fn(&ConfusionMatrix) -> f64| -> Result<MeanCi> {
        let xs: Vec<f64> = folds.iter().map(|r| f(&r.confusion)).collect();
        MeanCi::from_samples(&xs)
    };
    let per_class = dataset
        .classes()
        .iter()
        .enumerate()
        .map(|(c, &mode)| {
            Ok(ClassMetrics {
                mode,
                precision: over(&|m| m.precision(c))?,
                sensitivity: over(&|m| m.sensitivity(c))?,
                f1: over(&|m| m.f1(c))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let accuracy = over(&|m| m.accuracy())?;
    Ok(MetricReport {
        classifier: config.kind,
        spec: *dataset.spec(),
        classes: dataset.classes().to_vec(),
        seed: plan.seed(),
        per_class,
        accuracy,
        folds,
    })
}

/// Five-fold evaluation of one classifier configuration.
pub fn evaluate(dataset: &LabeledDataset, config: &ClassifierConfig, plan: &FoldPlan) -> Result<MetricReport> {
    let folds = (0..plan.fold_count())
        .map(|f| evaluate_fold(dataset, config, plan, f))
        .collect::<Result<Vec<_>>>()?;
    summarize(dataset, config, plan, folds)
}

/// Runs every grid cell in canonical order. `source` supplies the dataset
/// for one embedding; it should carry every feature and signal the grid
/// needs, columns are projected per cell. Folds are made once per
/// (embedding, class subset) and shared by all classifiers and feature sets.
pub fn sweep<F>(
    grid: &Grid,
    mut source: F,
    seed: u64,
    configure: impl Fn(ClassifierKind) -> ClassifierConfig,
) -> Result<Vec<MetricReport>>
where
    F: FnMut(crate::ordinal::EmbeddingParams) -> Result<LabeledDataset>,
{
    grid.validate()?;
    let mut out = Vec::new();
    for params in grid.embeddings()? {
        let full = source(params)?;
        for classes in &grid.class_subsets {
            let subset = full.subset_classes(classes)?;
            let plan = make_folds(&subset, seed)?;
            for &signals in &grid.signals {
                for &features in &grid.feature_sets {
                    let ds = subset.project(FeatureSpec::new(params, features, signals))?;
                    for &kind in &grid.classifiers {
                        out.push(evaluate(&ds, &configure(kind), &plan)?);
                    }
                }
            }
        }
    }
    Ok(out)
}
