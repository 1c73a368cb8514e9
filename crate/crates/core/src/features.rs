//! Per-trajectory feature vectors and labeled datasets.
//!
//! For each selected signal the series is turned into an ordinal sequence;
//! the pattern histogram gives `H` and `C`, the transition graph gives `PST`.
//! Values are laid out signal-major in canonical order:
//! `lat_H, lat_C, lat_PST, lon_H, ..., dist_PST`, restricted to the selected
//! signals and features.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::graph::build_graph;
use crate::ordinal::{extract_sequence, pattern_distribution, EmbeddingParams, TimeSeries};
use crate::quantifiers::{permutation_entropy, statistical_complexity};
use crate::signals::{Signal, SignalBundle};

/// Canonical transportation modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    Walk,
    Bike,
    Bus,
    CarTaxi,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Walk, Mode::Bike, Mode::Bus, Mode::CarTaxi];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Walk => "walk",
            Mode::Bike => "bike",
            Mode::Bus => "bus",
            Mode::CarTaxi => "car_taxi",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "walk" => Ok(Mode::Walk),
            "bike" => Ok(Mode::Bike),
            "bus" => Ok(Mode::Bus),
            "car_taxi" => Ok(Mode::CarTaxi),
            other => Err(invalid(alloc::format!("unknown mode `{other}`"))),
        }
    }
}

/// One of the three per-signal quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    /// Normalized permutation entropy.
    Entropy,
    /// Jensen–Shannon statistical complexity.
    Complexity,
    /// Probability of self-transition.
    SelfTransition,
}

impl Feature {
    pub const ALL: [Feature; 3] = [Feature::Entropy, Feature::Complexity, Feature::SelfTransition];

    pub fn short_name(self) -> &'static str {
        match self {
            Feature::Entropy => "H",
            Feature::Complexity => "C",
            Feature::SelfTransition => "PST",
        }
    }
}

/// A nonempty feature subset; only the compared sets `{H}`, `{C}`, `{PST}`,
/// `{H,C}` and `{H,C,PST}` are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSet {
    entropy: bool,
    complexity: bool,
    self_transition: bool,
}

impl FeatureSet {
    pub const H: FeatureSet = FeatureSet::raw(true, false, false);
    pub const C: FeatureSet = FeatureSet::raw(false, true, false);
    pub const PST: FeatureSet = FeatureSet::raw(false, false, true);
    pub const H_C: FeatureSet = FeatureSet::raw(true, true, false);
    pub const H_C_PST: FeatureSet = FeatureSet::raw(true, true, true);

    pub const COMPARED: [FeatureSet; 5] = [
        FeatureSet::H,
        FeatureSet::C,
        FeatureSet::PST,
        FeatureSet::H_C,
        FeatureSet::H_C_PST,
    ];

    const fn raw(entropy: bool, complexity: bool, self_transition: bool) -> Self {
        Self {
            entropy,
            complexity,
            self_transition,
        }
    }

    pub fn contains(&self, f: Feature) -> bool {
        match f {
            Feature::Entropy => self.entropy,
            Feature::Complexity => self.complexity,
            Feature::SelfTransition => self.self_transition,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Feature> + '_ {
        Feature::ALL.into_iter().filter(|f| self.contains(*f))
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Feature::short_name).collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut set = FeatureSet::raw(false, false, false);
        for part in s.split(['+', ',']).map(str::trim) {
            match part.to_ascii_uppercase().as_str() {
                "H" => set.entropy = true,
                "C" => set.complexity = true,
                "PST" | "P_ST" => set.self_transition = true,
                other => return Err(invalid(alloc::format!("unknown feature `{other}`"))),
            }
        }
        if !FeatureSet::COMPARED.contains(&set) {
            return Err(invalid(alloc::format!(
                "feature set `{s}` is not one of H, C, PST, H+C, H+C+PST"
            )));
        }
        Ok(set)
    }
}

/// A nonempty subset of the three signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignalSet {
    mask: u8,
}

impl SignalSet {
    pub const ALL: SignalSet = SignalSet { mask: 0b111 };

    pub fn new(signals: &[Signal]) -> Result<Self> {
        let mask = signals.iter().fold(0u8, |m, s| m | Self::bit(*s));
        if mask == 0 {
            return Err(invalid("signal set must not be empty"));
        }
        Ok(Self { mask })
    }

    pub fn single(signal: Signal) -> Self {
        Self {
            mask: Self::bit(signal),
        }
    }

    fn bit(s: Signal) -> u8 {
        match s {
            Signal::Latitude => 1,
            Signal::Longitude => 2,
            Signal::Distance => 4,
        }
    }

    pub fn contains(&self, s: Signal) -> bool {
        self.mask & Self::bit(s) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Signal> + '_ {
        Signal::ALL.into_iter().filter(|s| self.contains(*s))
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn union(self, other: SignalSet) -> SignalSet {
        SignalSet {
            mask: self.mask | other.mask,
        }
    }
}

impl fmt::Display for SignalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Signal::short_name).collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for SignalSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(SignalSet::ALL);
        }
        let signals = s.split(['+', ',']).map(str::parse).collect::<Result<Vec<Signal>>>()?;
        SignalSet::new(&signals)
    }
}

/// Embedding parameters plus the feature and signal selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSpec {
    pub params: EmbeddingParams,
    pub features: FeatureSet,
    pub signals: SignalSet,
}

impl FeatureSpec {
    pub fn new(params: EmbeddingParams, features: FeatureSet, signals: SignalSet) -> Self {
        Self {
            params,
            features,
            signals,
        }
    }

    /// Vector length, `|signals| * |features|`.
    pub fn width(&self) -> usize {
        self.signals.len() * self.features.len()
    }

    /// Minimum signal length: one transition needs `m >= 2`.
    pub fn min_signal_len(&self) -> usize {
        self.params.span() + 2
    }

    /// Column names in canonical order, e.g. `lat_H`.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.width());
        for s in self.signals.iter() {
            for f in self.features.iter() {
                names.push(alloc::format!("{}_{}", s.short_name(), f.short_name()));
            }
        }
        names
    }
}

/// All three quantities of one signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalFeatures {
    pub entropy: f64,
    pub complexity: f64,
    pub self_transition: f64,
}

impl SignalFeatures {
    pub fn get(&self, f: Feature) -> f64 {
        match f {
            Feature::Entropy => self.entropy,
            Feature::Complexity => self.complexity,
            Feature::SelfTransition => self.self_transition,
        }
    }
}

/// `H_S`, `C_JS` and `p_st` of a single series. Needs at least two patterns.
pub fn signal_features(series: &TimeSeries, params: EmbeddingParams) -> Result<SignalFeatures> {
    let seq = extract_sequence(series, params)?;
    let graph = build_graph(&seq)?;
    let dist = pattern_distribution(&seq)?;
    Ok(SignalFeatures {
        entropy: permutation_entropy(&dist),
        complexity: statistical_complexity(&dist),
        self_transition: graph.self_transition_probability(),
    })
}

/// A labeled feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub id: String,
    pub mode: Mode,
    pub values: Vec<f64>,
}

/// Why a trajectory produced no vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skip {
    pub id: String,
    pub mode: Mode,
    pub signal: Signal,
    pub len: usize,
    pub required: usize,
}

impl Skip {
    pub fn reason(&self) -> String {
        alloc::format!(
            "{} signal has {} samples, needs {}",
            self.signal,
            self.len,
            self.required
        )
    }
}

/// Outcome of [`extract_features`].
#[derive(Debug, Clone, PartialEq)]
pub enum Extraction {
    Vector(FeatureVector),
    Skipped(Skip),
}

/// A trajectory reduced to its label and signals.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSignals {
    pub id: String,
    pub mode: Mode,
    pub signals: SignalBundle,
}

/// Feature vector of one trajectory, or a skip when the shortest selected
/// signal is below `(D-1)tau + 2` samples.
pub fn extract_features(item: &LabeledSignals, spec: &FeatureSpec) -> Extraction {
    let required = spec.min_signal_len();
    if let Some((signal, len)) = spec
        .signals
        .iter()
        .map(|s| (s, item.signals.len_of(s)))
        .min_by_key(|&(_, len)| len)
        .filter(|&(_, len)| len < required)
    {
        return Extraction::Skipped(Skip {
            id: item.id.clone(),
            mode: item.mode,
            signal,
            len,
            required,
        });
    }

    let mut values = Vec::with_capacity(spec.width());
    for signal in spec.signals.iter() {
        let series = item.signals.get(signal).expect("length checked above");
        let sf = signal_features(series, spec.params).expect("length checked above");
        values.extend(spec.features.iter().map(|f| sf.get(f)));
    }
    Extraction::Vector(FeatureVector {
        id: item.id.clone(),
        mode: item.mode,
        values,
    })
}

/// Trajectories that were left out of a dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SkipReport {
    pub skipped: Vec<Skip>,
}

impl SkipReport {
    pub fn len(&self) -> usize {
        self.skipped.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skipped.is_empty()
    }

    /// Skip counts per (mode, limiting signal).
    pub fn counts(&self) -> BTreeMap<(Mode, Signal), usize> {
        let mut out = BTreeMap::new();
        for s in &self.skipped {
            *out.entry((s.mode, s.signal)).or_insert(0) += 1;
        }
        out
    }

    pub fn counts_by_mode(&self) -> BTreeMap<Mode, usize> {
        let mut out = BTreeMap::new();
        for s in &self.skipped {
            *out.entry(s.mode).or_insert(0) += 1;
        }
        out
    }
}

/// Feature vectors sharing one [`FeatureSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    spec: FeatureSpec,
    rows: Vec<FeatureVector>,
    classes: Vec<Mode>,
}

impl LabeledDataset {
    /// Validates widths and finiteness; the class set is the sorted set of
    /// modes present.
    pub fn new(spec: FeatureSpec, rows: Vec<FeatureVector>) -> Result<Self> {
        let width = spec.width();
        for r in &rows {
            if r.values.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    got: r.values.len(),
                });
            }
            if r.values.iter().any(|v| !v.is_finite()) {
                return Err(invalid(alloc::format!("non-finite feature in `{}`", r.id)));
            }
        }
        let mut classes: Vec<Mode> = rows.iter().map(|r| r.mode).collect();
        classes.sort();
        classes.dedup();
        Ok(Self { spec, rows, classes })
    }

    pub fn spec(&self) -> &FeatureSpec {
        &self.spec
    }

    pub fn rows(&self) -> &[FeatureVector] {
        &self.rows
    }

    pub fn classes(&self) -> &[Mode] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Class index of each row within [`classes`](Self::classes).
    pub fn labels(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| self.classes.binary_search(&r.mode).expect("class set covers rows"))
            .collect()
    }

    /// Row counts per class, aligned with [`classes`](Self::classes).
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.classes.len()];
        for l in self.labels() {
            counts[l] += 1;
        }
        counts
    }

    /// Keeps only rows whose mode is in `modes`.
    pub fn subset_classes(&self, modes: &[Mode]) -> Result<Self> {
        let rows = self.rows.iter().filter(|r| modes.contains(&r.mode)).cloned().collect();
        Self::new(self.spec, rows)
    }

    /// Selects the columns of `target` out of this dataset. `target` must use
    /// the same embedding and a subset of the signals and features.
    pub fn project(&self, target: FeatureSpec) -> Result<Self> {
        if target.params != self.spec.params {
            return Err(invalid("projection cannot change embedding parameters"));
        }
        let names = self.spec.column_names();
        let cols = target
            .column_names()
            .iter()
            .map(|c| {
                names
                    .iter()
                    .position(|n| n == c)
                    .ok_or_else(|| invalid(alloc::format!("column `{c}` not in dataset")))
            })
            .collect::<Result<Vec<usize>>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| FeatureVector {
                id: r.id.clone(),
                mode: r.mode,
                values: cols.iter().map(|&c| r.values[c]).collect(),
            })
            .collect();
        Self::new(target, rows)
    }

    /// Flattened row-major feature matrix.
    pub fn matrix(&self) -> crate::classify::Matrix {
        let data = self.rows.iter().flat_map(|r| r.values.iter().copied()).collect();
        crate::classify::Matrix::new(self.rows.len(), self.spec.width(), data)
            .expect("widths validated on construction")
    }
}

/// Extracts every trajectory and collects the non-skipped vectors.
pub fn build_dataset(items: &[LabeledSignals], spec: &FeatureSpec) -> Result<(LabeledDataset, SkipReport)> {
    if items.is_empty() {
        return Err(invalid("no trajectories given"));
    }
    let mut rows = Vec::new();
    let mut report = SkipReport::default();
    for item in items {
        match extract_features(item, spec) {
            Extraction::Vector(v) => rows.push(v),
            Extraction::Skipped(s) => report.skipped.push(s),
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok((LabeledDataset::new(*spec, rows)?, report))
}
