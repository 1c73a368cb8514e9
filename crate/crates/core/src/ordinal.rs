//! Bandt–Pompe ordinal patterns.
//!
//! A window of `D` samples spaced `tau` apart is replaced by the permutation
//! that sorts it ascending. Equal values keep their temporal order, so the
//! earlier sample gets the lower rank. Each permutation is identified by the
//! Lehmer code of its rank word, a dense index in `[0, D!)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Smallest supported embedding dimension.
pub const MIN_DIMENSION: usize = 3;
/// Largest supported embedding dimension.
pub const MAX_DIMENSION: usize = 7;

const FACTORIALS: [usize; MAX_DIMENSION + 1] = [1, 1, 2, 6, 24, 120, 720, 5040];

/// `D!` for `D <= 7`.
pub fn factorial(d: usize) -> usize {
    FACTORIALS[d]
}

/// An ordered sequence of finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("time series must have at least one sample"));
        }
        if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
            return Err(invalid(alloc::format!("non-finite sample at position {pos}")));
        }
        Ok(Self { samples })
    }

    pub fn from_slice(samples: &[f64]) -> Result<Self> {
        Self::new(samples.to_vec())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always `false`; a valid series has at least one sample.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Embedding dimension `D` and delay `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingParams {
    dimension: usize,
    delay: usize,
}

impl EmbeddingParams {
    pub fn new(dimension: usize, delay: usize) -> Result<Self> {
        if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&dimension) {
            return Err(invalid(alloc::format!(
                "embedding dimension {dimension} outside [{MIN_DIMENSION}, {MAX_DIMENSION}]"
            )));
        }
        if delay == 0 {
            return Err(invalid("embedding delay must be at least 1"));
        }
        Ok(Self { dimension, delay })
    }

    /// Bypasses the `[3, 7]` range check; used to exercise `D = 2` cases.
    #[cfg(test)]
    pub(crate) fn new_unchecked(dimension: usize, delay: usize) -> Self {
        Self { dimension, delay }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    /// Distance between the first and last sample of a window, `(D-1)tau`.
    pub fn span(&self) -> usize {
        (self.dimension - 1) * self.delay
    }

    /// Number of possible patterns, `D!`.
    pub fn pattern_count(&self) -> usize {
        factorial(self.dimension)
    }

    /// Number of windows in a series of length `n`, or `None` if none fits.
    pub fn window_count(&self, n: usize) -> Option<usize> {
        n.checked_sub(self.span()).filter(|&m| m >= 1)
    }
}

/// Largest delay `tau` with `tau (D-1) < n`.
pub fn max_delay(n: usize, dimension: usize) -> Result<usize> {
    if dimension < 2 {
        return Err(invalid("embedding dimension must be at least 2"));
    }
    if n < dimension {
        return Err(invalid(alloc::format!(
            "series length {n} is shorter than the embedding dimension {dimension}"
        )));
    }
    Ok((n - 1) / (dimension - 1))
}

/// One ordinal pattern: a permutation of `0..D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    dimension: u8,
    index: u16,
}

impl Pattern {
    /// Builds a pattern from its dense Lehmer index.
    pub fn from_index(dimension: usize, index: usize) -> Result<Self> {
        if !(1..=MAX_DIMENSION).contains(&dimension) || index >= factorial(dimension) {
            return Err(invalid(alloc::format!(
                "pattern index {index} invalid for dimension {dimension}"
            )));
        }
        Ok(Self {
            dimension: dimension as u8,
            index: index as u16,
        })
    }

    /// Builds a pattern from a rank word (the sorting permutation).
    pub fn from_rank_word(word: &[usize]) -> Result<Self> {
        let d = word.len();
        if !(1..=MAX_DIMENSION).contains(&d) {
            return Err(invalid(alloc::format!("rank word of length {d} unsupported")));
        }
        let mut seen = [false; MAX_DIMENSION];
        for &r in word {
            if r >= d || seen[r] {
                return Err(invalid("rank word is not a permutation"));
            }
            seen[r] = true;
        }
        Ok(Self {
            dimension: d as u8,
            index: lehmer_encode(word) as u16,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension as usize
    }

    pub fn index(&self) -> usize {
        self.index as usize
    }

    /// The rank word: window positions listed in ascending value order.
    pub fn rank_word(&self) -> Vec<usize> {
        let mut word = [0usize; MAX_DIMENSION];
        lehmer_decode(self.index(), &mut word[..self.dimension()]);
        word[..self.dimension()].to_vec()
    }
}

fn lehmer_encode(word: &[usize]) -> usize {
    let d = word.len();
    let mut code = 0;
    for i in 0..d {
        let smaller_after = word[i + 1..].iter().filter(|&&w| w < word[i]).count();
        code += smaller_after * FACTORIALS[d - 1 - i];
    }
    code
}

fn lehmer_decode(mut code: usize, out: &mut [usize]) {
    let d = out.len();
    let mut available = [0usize; MAX_DIMENSION];
    for (i, slot) in available.iter_mut().enumerate().take(d) {
        *slot = i;
    }
    let mut remaining = d;
    for i in 0..d {
        let f = FACTORIALS[d - 1 - i];
        let k = code / f;
        code %= f;
        out[i] = available[k];
        available.copy_within(k + 1..remaining, k);
        remaining -= 1;
    }
}

/// Lehmer index of the stable ascending argsort of `window`, without
/// validation. `window.len()` must be in `1..=7`.
fn pattern_index(window: &[f64]) -> usize {
    let d = window.len();
    let mut order = [0usize; MAX_DIMENSION];
    for (i, slot) in order.iter_mut().enumerate().take(d) {
        *slot = i;
    }
    // insertion sort is stable and cheap for D <= 7
    for i in 1..d {
        let mut j = i;
        while j > 0 && window[order[j - 1]] > window[order[j]] {
            order.swap(j - 1, j);
            j -= 1;
        }
    }
    lehmer_encode(&order[..d])
}

/// The ordinal pattern of one window. Ties rank the earlier sample first.
pub fn extract_pattern(window: &[f64]) -> Result<Pattern> {
    let d = window.len();
    if !(1..=MAX_DIMENSION).contains(&d) {
        return Err(invalid(alloc::format!("window of length {d} unsupported")));
    }
    if window.iter().any(|v| !v.is_finite()) {
        return Err(invalid("window contains a non-finite value"));
    }
    Ok(Pattern {
        dimension: d as u8,
        index: pattern_index(window) as u16,
    })
}

/// The sequence `Π` of patterns extracted from one series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalSequence {
    params: EmbeddingParams,
    source_len: usize,
    indices: Vec<u16>,
}

impl OrdinalSequence {
    pub fn params(&self) -> EmbeddingParams {
        self.params
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    /// Number of patterns, `m = n - (D-1)tau`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Dense pattern indices in temporal order.
    pub fn indices(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.indices.iter().map(|&i| i as usize)
    }

    pub fn patterns(&self) -> impl ExactSizeIterator<Item = Pattern> + '_ {
        let dimension = self.params.dimension as u8;
        self.indices.iter().map(move |&index| Pattern { dimension, index })
    }
}

/// Slides a window over the series: windows start one sample apart, samples
/// inside a window are `tau` apart.
pub fn extract_sequence(series: &TimeSeries, params: EmbeddingParams) -> Result<OrdinalSequence> {
    let x = series.as_slice();
    let n = x.len();
    let d = params.dimension();
    let tau = params.delay();
    let m = params.window_count(n).ok_or(Error::SeriesTooShort {
        n,
        dimension: d,
        delay: tau,
    })?;

    let mut window = [0.0f64; MAX_DIMENSION];
    let indices = (0..m)
        .map(|t| {
            for (j, slot) in window.iter_mut().enumerate().take(d) {
                *slot = x[t + j * tau];
            }
            pattern_index(&window[..d]) as u16
        })
        .collect();

    Ok(OrdinalSequence {
        params,
        source_len: n,
        indices,
    })
}

/// Relative pattern frequencies, dense over all `D!` patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternDistribution {
    params: EmbeddingParams,
    counts: Vec<u32>,
    probabilities: Vec<f64>,
    total: usize,
}

impl PatternDistribution {
    pub fn params(&self) -> EmbeddingParams {
        self.params
    }

    /// Probability of each pattern, indexed by Lehmer index.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn probability(&self, pattern: Pattern) -> f64 {
        self.probabilities[pattern.index()]
    }

    /// Number of patterns the histogram was built from.
    pub fn total(&self) -> usize {
        self.total
    }

    /// Number of slots, `D!`.
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// A distribution given directly by its probabilities, one per pattern
    /// index, for analytic cases such as the uniform or degenerate one.
    pub fn from_probabilities(params: EmbeddingParams, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != params.pattern_count() {
            return Err(invalid(alloc::format!(
                "expected {} probabilities, got {}",
                params.pattern_count(),
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0) {
            return Err(invalid("probabilities must lie in [0, 1]"));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(invalid(alloc::format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self {
            params,
            counts: Vec::new(),
            probabilities,
            total: 0,
        })
    }
}

/// `p(π) = |s_π| / m` for every pattern.
pub fn pattern_distribution(seq: &OrdinalSequence) -> Result<PatternDistribution> {
    if seq.is_empty() {
        return Err(invalid("cannot build a distribution from an empty sequence"));
    }
    let slots = seq.params.pattern_count();
    let mut counts = vec![0u32; slots];
    for i in seq.indices() {
        counts[i] += 1;
    }
    let m = seq.len() as f64;
    let probabilities = counts.iter().map(|&c| c as f64 / m).collect();
    Ok(PatternDistribution {
        params: seq.params,
        counts,
        probabilities,
        total: seq.len(),
    })
}
