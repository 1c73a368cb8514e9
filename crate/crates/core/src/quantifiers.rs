//! Information-theory quantifiers of a pattern distribution: normalized
//! permutation entropy `H_S` and Jensen–Shannon statistical complexity
//! `C_JS`.
//!
//! All entropies are in nats. `H_S` is a ratio and does not depend on the
//! base; the Jensen–Shannon term must share the base of `Q0`, which is
//! written with natural logarithms.

use crate::ordinal::{factorial, PatternDistribution};

/// `H_S` and `C_JS` of one distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantifierPair {
    pub entropy: f64,
    pub complexity: f64,
}

fn entropy_of(probabilities: impl Iterator<Item = f64>) -> f64 {
    let h: f64 = probabilities.filter(|&p| p > 0.0).map(|p| -p * libm::log(p)).sum();
    // -0.0 for the degenerate case
    h.max(0.0)
}

/// Entropy of the uniform distribution over `slots` outcomes, summed the
/// same way as [`entropy_of`] so that `JS(p_u, p_u)` is exactly zero.
fn uniform_entropy(slots: usize) -> f64 {
    let u = 1.0 / slots as f64;
    entropy_of(core::iter::repeat_n(u, slots))
}

/// Shannon entropy `-Σ p ln p` in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(p: &PatternDistribution) -> f64 {
    entropy_of(p.probabilities().iter().copied())
}

/// Normalized permutation entropy `H / ln(D!)`, in `[0, 1]`.
pub fn permutation_entropy(p: &PatternDistribution) -> f64 {
    let h_max = libm::log(p.len() as f64);
    (shannon_entropy(p) / h_max).clamp(0.0, 1.0)
}

/// Normalization constant `Q0`, the inverse of the largest attainable
/// Jensen–Shannon divergence from the uniform distribution over `D!`
/// patterns.
pub fn q_zero(dimension: usize) -> f64 {
    q_zero_for_slots(factorial(dimension))
}

fn q_zero_for_slots(slots: usize) -> f64 {
    let n = slots as f64;
    let bracket = (n + 1.0) / n * libm::log(n + 1.0) - 2.0 * libm::log(2.0 * n) + libm::log(n);
    -2.0 / bracket
}

/// Jensen–Shannon divergence `S[(p + p_u)/2] - (S[p] + S[p_u]) / 2`.
pub fn jensen_shannon_to_uniform(p: &PatternDistribution) -> f64 {
    let slots = p.len();
    let u = 1.0 / slots as f64;
    let mixed = entropy_of(p.probabilities().iter().map(|&pi| 0.5 * (pi + u)));
    let js = mixed - 0.5 * (shannon_entropy(p) + uniform_entropy(slots));
    js.max(0.0)
}

/// Disequilibrium `Q_JS = Q0 * JS`, in `[0, 1]`.
pub fn disequilibrium(p: &PatternDistribution) -> f64 {
    (q_zero_for_slots(p.len()) * jensen_shannon_to_uniform(p)).clamp(0.0, 1.0)
}

/// Statistical complexity `C_JS = Q_JS * H_S`.
pub fn statistical_complexity(p: &PatternDistribution) -> f64 {
    disequilibrium(p) * permutation_entropy(p)
}

pub fn quantifiers(p: &PatternDistribution) -> QuantifierPair {
    QuantifierPair {
        entropy: permutation_entropy(p),
        complexity: statistical_complexity(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::EmbeddingParams;
    use alloc::vec;
    use alloc::vec::Vec;

    fn dist(d: usize, probs: Vec<f64>) -> PatternDistribution {
        PatternDistribution::from_probabilities(EmbeddingParams::new(d, 1).unwrap(), probs).unwrap()
    }

    fn degenerate(d: usize) -> PatternDistribution {
        let mut p = vec![0.0; factorial(d)];
        p[0] = 1.0;
        dist(d, p)
    }

    fn uniform(d: usize) -> PatternDistribution {
        let n = factorial(d);
        dist(d, vec![1.0 / n as f64; n])
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&degenerate(3)), 0.0);
        assert!((shannon_entropy(&uniform(3)) - 1.791_759_469_228_055).abs() < 1e-12);
        // (2/3, 1/3) placed in two of the six slots
        let p = dist(3, vec![2.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((shannon_entropy(&p) - 0.636_514_168_294_813).abs() < 1e-12);
    }

    #[test]
    fn permutation_entropy_examples() {
        assert_eq!(permutation_entropy(&degenerate(4)), 0.0);
        assert!((permutation_entropy(&uniform(4)) - 1.0).abs() < 1e-12);
        let p = dist(3, vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        assert!((permutation_entropy(&p) - 0.386_852_807_234_542).abs() < 1e-12);
    }

    #[test]
    fn q_zero_inverts_maximal_divergence() {
        for d in 3..=7 {
            let q0 = q_zero(d);
            assert!(q0 > 0.0);
            let js = jensen_shannon_to_uniform(&degenerate(d));
            assert!((q0 * js - 1.0).abs() < 1e-9, "D={d}: {}", q0 * js);
        }
        // closed form at D=3, evaluated independently
        let ln = libm::log;
        let expected = -2.0 / (7.0 / 6.0 * ln(7.0) - 2.0 * ln(12.0) + ln(6.0));
        assert!((q_zero(3) - expected).abs() < 1e-12);
    }

    #[test]
    fn complexity_vanishes_at_extremes() {
        for d in 3..=7 {
            assert_eq!(statistical_complexity(&uniform(d)), 0.0);
            assert_eq!(statistical_complexity(&degenerate(d)), 0.0);
        }
    }

    #[test]
    fn complexity_of_two_spike_distribution() {
        // value from an independent evaluation of the three-term formula
        let p = dist(3, vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        let c = statistical_complexity(&p);
        assert!((c - 0.271_238_625_514_461).abs() < 1e-12, "{c}");
    }
}
