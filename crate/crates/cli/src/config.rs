//! Run configuration: a TOML file, overridable by `OPTG_*` environment
//! variables and command-line flags (flags win).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use optg_core::classify::{ClassifierConfig, ClassifierKind, Gamma};
use optg_core::eval::{format_classes, parse_classes, Grid};
use optg_core::features::{FeatureSet, Mode, SignalSet};
use optg_core::signals::DistanceMetric;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Serializes through `Display` and parses through `FromStr`.
mod text {
    use super::*;

    pub fn serialize<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: fmt::Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

mod text_vec {
    use super::*;

    pub fn serialize<T: fmt::Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Vec<T>, D::Error>
    where
        T: FromStr,
        T::Err: fmt::Display,
        D: Deserializer<'de>,
    {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// A class subset written as `walk+bus` or `all`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classes(pub Vec<Mode>);

impl fmt::Display for Classes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_classes(&self.0))
    }
}

impl FromStr for Classes {
    type Err = optg_core::Error;

    fn from_str(s: &str) -> optg_core::Result<Self> {
        parse_classes(s).map(Classes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub dimensions: Vec<usize>,
    pub delays: Vec<usize>,
    #[serde(with = "text_vec")]
    pub feature_sets: Vec<FeatureSet>,
    #[serde(with = "text_vec")]
    pub signals: Vec<SignalSet>,
    #[serde(with = "text_vec")]
    pub classifiers: Vec<ClassifierKind>,
    #[serde(with = "text_vec")]
    pub class_subsets: Vec<Classes>,
}

impl Default for GridConfig {
    /// The sweep behind the accuracy-by-D and accuracy-by-τ figures.
    fn default() -> Self {
        Self {
            dimensions: (3..=7).collect(),
            delays: vec![1, 2, 3, 5, 10, 15],
            feature_sets: FeatureSet::COMPARED.to_vec(),
            signals: vec![SignalSet::ALL],
            classifiers: ClassifierKind::ALL.to_vec(),
            class_subsets: vec![Classes(Mode::ALL.to_vec())],
        }
    }
}

impl GridConfig {
    pub fn to_grid(&self) -> Grid {
        Grid {
            dimensions: self.dimensions.clone(),
            delays: self.delays.clone(),
            feature_sets: self.feature_sets.clone(),
            signals: self.signals.clone(),
            classifiers: self.classifiers.clone(),
            class_subsets: self.class_subsets.iter().map(|c| c.0.clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSetting(pub Gamma);

impl fmt::Display for GammaSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Gamma::Scale => f.write_str("scale"),
            Gamma::Value(g) => write!(f, "{g}"),
        }
    }
}

impl FromStr for GammaSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "scale" => Ok(GammaSetting(Gamma::Scale)),
            v => v
                .parse::<f64>()
                .map(|g| GammaSetting(Gamma::Value(g)))
                .map_err(|_| format!("gamma must be `scale` or a number, got `{v}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifierSettings {
    pub k: usize,
    pub cost: f64,
    #[serde(with = "text")]
    pub gamma: GammaSetting,
    pub tolerance: f64,
    pub min_split: usize,
    pub min_leaf: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
}

impl Default for ClassifierSettings {
    fn default() -> Self {
        let d = ClassifierConfig::new(ClassifierKind::Knn);
        Self {
            k: d.k,
            cost: d.cost,
            gamma: GammaSetting(d.gamma),
            tolerance: d.tolerance,
            min_split: d.min_split,
            min_leaf: d.min_leaf,
            max_depth: d.max_depth,
        }
    }
}

impl ClassifierSettings {
    pub fn config(&self, kind: ClassifierKind) -> ClassifierConfig {
        let mut c = ClassifierConfig::new(kind);
        c.k = self.k;
        c.cost = self.cost;
        c.gamma = self.gamma.0;
        c.tolerance = self.tolerance;
        c.min_split = self.min_split;
        c.min_leaf = self.min_leaf;
        c.max_depth = self.max_depth;
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportSettings {
    /// D held fixed in the accuracy-by-τ table.
    pub fixed_dimension: usize,
}

impl Default for ReportSettings {
    fn default() -> Self {
        Self { fixed_dimension: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data_root: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    #[serde(with = "text")]
    pub distance: DistanceMetric,
    pub grid: GridConfig,
    pub classifier: ClassifierSettings,
    pub report: ReportSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data_root: None,
            out: PathBuf::from("out"),
            seed: 42,
            jobs: 0,
            distance: DistanceMetric::Euclidean,
            grid: GridConfig::default(),
            classifier: ClassifierSettings::default(),
            report: ReportSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config {
            path: path.into(),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|e| Error::Config {
            path: path.into(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.into(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn validate(&self) -> optg_core::Result<()> {
        self.grid.to_grid().validate()?;
        for kind in &self.grid.classifiers {
            self.classifier.config(*kind).validate()?;
        }
        Ok(())
    }

    pub fn features_dir(&self) -> PathBuf {
        self.out.join("features")
    }

    pub fn store_path(&self) -> PathBuf {
        self.out.join("trajectories.jsonl")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_full_grid() {
        let c = RunConfig::default();
        assert_eq!(c.grid.to_grid().cells().unwrap().len(), 5 * 6 * 5 * 4);
        assert_eq!(c.distance, DistanceMetric::Euclidean);
    }

    #[test]
    fn round_trip() {
        let text = r#"
            out = "results"
            seed = 7
            jobs = 2
            distance = "haversine"

            [grid]
            dimensions = [5]
            delays = [1, 15]
            feature_sets = ["H+C+PST", "PST"]
            signals = ["lat+lon+dist", "dist"]
            classifiers = ["svm-rbf"]
            class_subsets = ["walk+bus", "all"]

            [classifier]
            gamma = "0.5"
            max_depth = 12
        "#;
        let a = RunConfig::from_toml(text, Path::new("x.toml")).unwrap();
        assert_eq!(a.grid.class_subsets[0].0, vec![Mode::Walk, Mode::Bus]);
        assert_eq!(a.classifier.gamma.0, Gamma::Value(0.5));
        let b = RunConfig::from_toml(&a.to_toml(), Path::new("y.toml")).unwrap();
        assert_eq!(a, b);
        let d = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&d.to_toml(), Path::new("d.toml")).unwrap(), d);
    }

    #[test]
    fn invalid_values_rejected() {
        for bad in [
            "[grid]\ndimensions = [8]",
            "[grid]\ndelays = []",
            "[grid]\nclassifiers = [\"forest\"]",
            "[grid]\nfeature_sets = [\"H+PST\"]",
            "[classifier]\ncost = -1.0",
            "unknown = 1",
        ] {
            let err = RunConfig::from_toml(bad, Path::new("c.toml")).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}");
        }
    }
}
