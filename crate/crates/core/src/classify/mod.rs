//! k-NN, SMO-trained SVMs and a CART decision tree.
//!
//! Classes are dense indices `0..n_classes`. Models are immutable after
//! training and prediction is a pure function of the model and the input.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};

mod knn;
pub mod smo;
mod svm;
mod tree;

pub use knn::KnnModel;
pub use svm::{BinarySvm, Kernel, SvmModel};
pub use tree::{TreeModel, TreeNode};

/// Dense row-major matrix of finite feature values.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid(alloc::format!(
                "matrix data has {} values, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// Rows picked by index, in the given order.
    pub fn select(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn map_columns(&self, f: impl Fn(usize, f64) -> f64) -> Matrix {
        let cols = self.cols;
        let data = self.data.iter().enumerate().map(|(k, &v)| f(k % cols, v)).collect();
        Matrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ClassifierKind {
    Knn,
    SvmLinear,
    SvmRbf,
    DecisionTree,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::Knn,
        ClassifierKind::SvmLinear,
        ClassifierKind::SvmRbf,
        ClassifierKind::DecisionTree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::SvmLinear => "svm-linear",
            ClassifierKind::SvmRbf => "svm-rbf",
            ClassifierKind::DecisionTree => "tree",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "knn" | "k-nn" => Ok(ClassifierKind::Knn),
            "svm-linear" | "svm-l" | "svm_linear" => Ok(ClassifierKind::SvmLinear),
            "svm-rbf" | "svm-r" | "svm_rbf" => Ok(ClassifierKind::SvmRbf),
            "tree" | "dt" | "decision-tree" | "decision_tree" => Ok(ClassifierKind::DecisionTree),
            other => Err(invalid(alloc::format!("unknown classifier `{other}`"))),
        }
    }
}

/// RBF width. `Scale` resolves to `1 / (n_features * var(X))` over all
/// entries of the (standardized) training matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Gamma {
    Scale,
    Value(f64),
}

/// Hyperparameters for [`train`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    /// Neighbors for k-NN.
    pub k: usize,
    /// SVM cost `C`.
    pub cost: f64,
    pub gamma: Gamma,
    /// SMO stopping tolerance on the maximal violating pair.
    pub tolerance: f64,
    /// Smallest node the tree may split.
    pub min_split: usize,
    /// Smallest leaf the tree may create.
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    /// Z-score features with training statistics before fitting.
    pub standardize: bool,
}

impl ClassifierConfig {
    /// Defaults: k = 2, C = 1, `gamma = scale`, tolerance 1e-3, leaves of at
    /// least 5, unlimited depth; standardization for k-NN and SVMs only.
    pub fn new(kind: ClassifierKind) -> Self {
        Self {
            kind,
            k: 2,
            cost: 1.0,
            gamma: Gamma::Scale,
            tolerance: 1e-3,
            min_split: 2,
            min_leaf: 5,
            max_depth: None,
            standardize: !matches!(kind, ClassifierKind::DecisionTree),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if !(self.cost > 0.0 && self.cost.is_finite()) {
            return Err(invalid("SVM cost must be positive"));
        }
        if let Gamma::Value(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(invalid("gamma must be positive"));
            }
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(invalid("tolerance must be positive"));
        }
        if self.min_leaf == 0 {
            return Err(invalid("min_leaf must be at least 1"));
        }
        Ok(())
    }
}

/// Per-feature z-score parameters captured from the training data.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    /// Population mean and standard deviation; constant columns get scale 1.
    pub fn fit(x: &Matrix) -> Self {
        let n = x.rows() as f64;
        let mut mean = alloc::vec![0.0; x.cols()];
        for row in x.iter_rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = alloc::vec![0.0; x.cols()];
        for row in x.iter_rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = libm::sqrt(s / n);
                if sd > 0.0 && sd.is_finite() {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, std }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn transform(&self, x: &Matrix) -> Matrix {
        x.map_columns(|c, v| (v - self.mean[c]) / self.std[c])
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelBody {
    Knn(KnnModel),
    Svm(SvmModel),
    Tree(TreeModel),
}

/// A fitted classifier.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainedModel {
    pub kind: ClassifierKind,
    pub n_classes: usize,
    pub n_features: usize,
    pub scaler: Option<Scaler>,
    pub body: ModelBody,
}

impl TrainedModel {
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite feature value"));
        }
        let scaled;
        let x = match &self.scaler {
            Some(s) => {
                scaled = s.transform_row(x);
                &scaled[..]
            }
            None => x,
        };
        Ok(match &self.body {
            ModelBody::Knn(m) => m.predict(x),
            ModelBody::Svm(m) => m.predict(x),
            ModelBody::Tree(m) => m.predict(x),
        })
    }

    pub fn predict_all(&self, x: &Matrix) -> Result<Vec<usize>> {
        x.iter_rows().map(|r| self.predict(r)).collect()
    }
}

/// Fits `config.kind` on rows `x` with labels `y` in `0..n_classes`.
pub fn train(config: &ClassifierConfig, x: &Matrix, y: &[usize], n_classes: usize) -> Result<TrainedModel> {
    config.validate()?;
    if x.rows() == 0 {
        return Err(invalid("training set is empty"));
    }
    if x.rows() != y.len() {
        return Err(invalid(alloc::format!("{} rows but {} labels", x.rows(), y.len())));
    }
    if x.cols() == 0 {
        return Err(invalid("training set has no features"));
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(invalid("non-finite feature value in training set"));
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
        return Err(invalid(alloc::format!("label {bad} outside 0..{n_classes}")));
    }
    let mut present = alloc::vec![false; n_classes];
    y.iter().for_each(|&l| present[l] = true);
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(invalid("training set needs at least two classes"));
    }

    let scaler = config.standardize.then(|| Scaler::fit(x));
    let scaled;
    let xs = match &scaler {
        Some(s) => {
            scaled = s.transform(x);
            &scaled
        }
        None => x,
    };

    let body = match config.kind {
        ClassifierKind::Knn => ModelBody::Knn(KnnModel::fit(xs, y, config.k)),
        ClassifierKind::SvmLinear => ModelBody::Svm(SvmModel::fit(xs, y, n_classes, Kernel::Linear, config)?),
        ClassifierKind::SvmRbf => {
            let gamma = match config.gamma {
                Gamma::Value(g) => g,
                Gamma::Scale => scale_gamma(xs),
            };
            ModelBody::Svm(SvmModel::fit(xs, y, n_classes, Kernel::Rbf { gamma }, config)?)
        }
        ClassifierKind::DecisionTree => ModelBody::Tree(TreeModel::fit(xs, y, n_classes, config)),
    };

    Ok(TrainedModel {
        kind: config.kind,
        n_classes,
        n_features: x.cols(),
        scaler,
        body,
    })
}

/// `1 / (n_features * var)` over every entry of `x`; 1 when `x` is constant.
pub fn scale_gamma(x: &Matrix) -> f64 {
    let data = x.as_slice();
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var > 0.0 {
        1.0 / (x.cols() as f64 * var)
    } else {
        1.0
    }
}

/// Fraction of rows predicted correctly.
pub fn accuracy(model: &TrainedModel, x: &Matrix, y: &[usize]) -> Result<f64> {
    let pred = model.predict_all(x)?;
    let hits = pred.iter().zip(y).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / y.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn blobs() -> (Matrix, Vec<usize>) {
        // two tight groups far apart, deterministic offsets
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..40 {
            let jitter = ((i * 37 % 17) as f64 - 8.0) / 40.0;
            let jitter2 = ((i * 53 % 13) as f64 - 6.0) / 30.0;
            rows.push(vec![jitter, jitter2]);
            y.push(0);
            rows.push(vec![4.0 + jitter2, 4.0 + jitter]);
            y.push(1);
        }
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn every_kind_separates_blobs() {
        let (x, y) = blobs();
        for kind in ClassifierKind::ALL {
            let m = train(&ClassifierConfig::new(kind), &x, &y, 2).unwrap();
            assert_eq!(accuracy(&m, &x, &y).unwrap(), 1.0, "{kind}");
        }
    }

    #[test]
    fn rejects_single_class() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let err = train(&ClassifierConfig::new(ClassifierKind::Knn), &x, &[0, 0], 2).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn rejects_non_finite() {
        let x = Matrix::from_rows(&[vec![0.0], vec![f64::NAN]]).unwrap();
        assert!(train(&ClassifierConfig::new(ClassifierKind::Knn), &x, &[0, 1], 2).is_err());
    }

    #[test]
    fn predict_checks_dimension() {
        let (x, y) = blobs();
        let m = train(&ClassifierConfig::new(ClassifierKind::DecisionTree), &x, &y, 2).unwrap();
        assert_eq!(
            m.predict(&[1.0]).unwrap_err(),
            Error::DimensionMismatch { expected: 2, got: 1 }
        );
    }

    #[test]
    fn scaler_constant_column() {
        let x = Matrix::from_rows(&[vec![1.0, 3.0], vec![1.0, 5.0]]).unwrap();
        let s = Scaler::fit(&x);
        assert_eq!(s.mean, vec![1.0, 4.0]);
        assert_eq!(s.std, vec![1.0, 1.0]);
        assert_eq!(s.transform_row(&[1.0, 5.0]), vec![0.0, 1.0]);
    }

    #[test]
    fn gamma_scale_of_standardized_data() {
        let (x, _) = blobs();
        let xs = Scaler::fit(&x).transform(&x);
        // each column has unit variance and zero mean
        assert!((scale_gamma(&xs) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ClassifierKind::ALL {
            assert_eq!(k.as_str().parse::<ClassifierKind>().unwrap(), k);
        }
        assert!("forest".parse::<ClassifierKind>().is_err());
    }
}
