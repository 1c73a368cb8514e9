//! Brute-force reference path. Windows are sorted as (value, position) pairs
//! and patterns are keyed by the resulting position lists; every quantity
//! comes straight from counts.
#![allow(dead_code)]

use std::collections::HashMap;

pub fn window_pattern(x: &[f64], start: usize, d: usize, tau: usize) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize)> = (0..d).map(|k| (x[start + k * tau], k)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    pairs.into_iter().map(|(_, k)| k).collect()
}

pub fn patterns(x: &[f64], d: usize, tau: usize) -> Vec<Vec<usize>> {
    let span = (d - 1) * tau;
    if x.len() <= span {
        return Vec::new();
    }
    (0..x.len() - span).map(|s| window_pattern(x, s, d, tau)).collect()
}

fn fact(d: usize) -> usize {
    (1..=d).product()
}

/// Probabilities of the observed patterns, padded with zeros to `D!`.
pub fn probabilities(x: &[f64], d: usize, tau: usize) -> Vec<f64> {
    let pats = patterns(x, d, tau);
    let mut hist: HashMap<Vec<usize>, usize> = HashMap::new();
    for p in &pats {
        *hist.entry(p.clone()).or_default() += 1;
    }
    let m = pats.len() as f64;
    let mut probs: Vec<f64> = hist.values().map(|&c| c as f64 / m).collect();
    probs.resize(fact(d), 0.0);
    probs
}

fn shannon(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>()
}

fn js_uniform(p: &[f64]) -> f64 {
    let n = p.len() as f64;
    let u = vec![1.0 / n; p.len()];
    let mid: Vec<f64> = p.iter().zip(&u).map(|(a, b)| 0.5 * (a + b)).collect();
    shannon(&mid) - 0.5 * shannon(p) - 0.5 * shannon(&u)
}

/// `(H_S, C_JS)` with the normalizer taken as 1 / JS(delta, uniform).
pub fn entropy_complexity(p: &[f64]) -> (f64, f64) {
    let n = p.len();
    let h = shannon(p) / (n as f64).ln();
    let mut delta = vec![0.0; n];
    delta[0] = 1.0;
    let q0 = 1.0 / js_uniform(&delta);
    (h, q0 * js_uniform(p) * h)
}

pub fn self_transition(x: &[f64], d: usize, tau: usize) -> f64 {
    let pats = patterns(x, d, tau);
    let repeats = pats.windows(2).filter(|w| w[0] == w[1]).count();
    repeats as f64 / (pats.len() - 1) as f64
}
