use alloc::string::String;
use alloc::vec::Vec;

use crate::classify::ClassifierKind;
use crate::error::{invalid, Result};
use crate::features::{FeatureSet, FeatureSpec, Mode, SignalSet};
use crate::ordinal::EmbeddingParams;

/// Sweep axes. Cells are enumerated D-major, then τ, class subset, signal
/// set, feature set and classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dimensions: Vec<usize>,
    pub delays: Vec<usize>,
    pub feature_sets: Vec<FeatureSet>,
    pub signals: Vec<SignalSet>,
    pub classifiers: Vec<ClassifierKind>,
    pub class_subsets: Vec<Vec<Mode>>,
}

/// One grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub spec: FeatureSpec,
    pub classifier: ClassifierKind,
    pub classes: Vec<Mode>,
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if self.dimensions.is_empty()
            || self.delays.is_empty()
            || self.feature_sets.is_empty()
            || self.signals.is_empty()
            || self.classifiers.is_empty()
            || self.class_subsets.is_empty()
        {
            return Err(invalid("every grid axis needs at least one value"));
        }
        if self.signals.is_empty() || self.signals.iter().any(SignalSet::is_empty) {
            return Err(invalid("no signals selected"));
        }
        for s in &self.class_subsets {
            if s.len() < 2 {
                return Err(invalid("a class subset needs at least two modes"));
            }
        }
        self.embeddings().map(|_| ())
    }

    /// Distinct embeddings in sweep order.
    pub fn embeddings(&self) -> Result<Vec<EmbeddingParams>> {
        let mut out = Vec::new();
        for &d in &self.dimensions {
            for &t in &self.delays {
                let p = EmbeddingParams::new(d, t)?;
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        Ok(out)
    }

    /// Union of every signal set, the columns extraction has to produce.
    pub fn signal_union(&self) -> SignalSet {
        self.signals
            .iter()
            .copied()
            .reduce(SignalSet::union)
            .unwrap_or(SignalSet::ALL)
    }

    pub fn cells(&self) -> Result<Vec<Cell>> {
        self.validate()?;
        let mut out = Vec::new();
        for params in self.embeddings()? {
            for classes in &self.class_subsets {
                for &signals in &self.signals {
                    for &features in &self.feature_sets {
                        for &classifier in &self.classifiers {
                            out.push(Cell {
                                spec: FeatureSpec::new(params, features, signals),
                                classifier,
                                classes: classes.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Parses `walk+bus` or `all` into a sorted, deduplicated mode list.
pub fn parse_classes(s: &str) -> Result<Vec<Mode>> {
    let s = s.trim();
    let mut modes = if s == "all" {
        Mode::ALL.to_vec()
    } else {
        s.split('+').map(str::parse).collect::<Result<Vec<Mode>>>()?
    };
    modes.sort();
    modes.dedup();
    if modes.len() < 2 {
        return Err(invalid(alloc::format!("class subset `{s}` needs two modes")));
    }
    Ok(modes)
}

pub fn format_classes(modes: &[Mode]) -> String {
    modes.iter().map(|m| m.as_str()).collect::<Vec<_>>().join("+")
}
