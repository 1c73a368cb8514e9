use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Counts indexed `[actual][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    n: usize,
    counts: Vec<usize>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        Self {
            n: n_classes,
            counts: vec![0; n_classes * n_classes],
        }
    }

    pub fn from_predictions(n_classes: usize, actual: &[usize], predicted: &[usize]) -> Result<Self> {
        if actual.len() != predicted.len() {
            return Err(invalid("actual and predicted lengths differ"));
        }
        let mut m = Self::new(n_classes);
        for (&a, &p) in actual.iter().zip(predicted) {
            if a >= n_classes || p >= n_classes {
                return Err(invalid("label out of range"));
            }
            m.add(a, p);
        }
        Ok(m)
    }

    pub fn add(&mut self, actual: usize, predicted: usize) {
        self.counts[actual * self.n + predicted] += 1;
    }

    pub fn n_classes(&self) -> usize {
        self.n
    }

    pub fn get(&self, actual: usize, predicted: usize) -> usize {
        self.counts[actual * self.n + predicted]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.n).map(|c| self.get(c, c)).sum()
    }

    /// Row sum: test members of class `c`.
    pub fn support(&self, c: usize) -> usize {
        (0..self.n).map(|p| self.get(c, p)).sum()
    }

    pub fn predicted(&self, c: usize) -> usize {
        (0..self.n).map(|a| self.get(a, c)).sum()
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.trace(), self.total())
    }

    /// `TP / (TP + FP)`, 0 when the class was never predicted.
    pub fn precision(&self, c: usize) -> f64 {
        ratio(self.get(c, c), self.predicted(c))
    }

    /// `TP / (TP + FN)`, 0 for an empty class.
    pub fn sensitivity(&self, c: usize) -> f64 {
        ratio(self.get(c, c), self.support(c))
    }

    pub fn f1(&self, c: usize) -> f64 {
        let p = self.precision(c);
        let s = self.sensitivity(c);
        if p + s == 0.0 {
            0.0
        } else {
            2.0 * p * s / (p + s)
        }
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

// t quantiles at 0.975 for 1..=30 degrees of freedom
const T975: [f64; 30] = [
    12.706204736432095,
    4.302652729696142,
    3.182446305284263,
    2.7764451051977987,
    2.570581835636314,
    2.4469118511449692,
    2.3646242515927844,
    2.306004135204166,
    2.2621571628540993,
    2.2281388519649385,
    2.200985160082949,
    2.1788128296634177,
    2.1603686564610127,
    2.1447866879169273,
    2.131449545559323,
    2.1199052992210112,
    2.1098155778331806,
    2.10092204024096,
    2.093024054408263,
    2.0859634472658364,
    2.079613844727662,
    2.0738730679040147,
    2.0686576104190406,
    2.0638985616280205,
    2.059538552753294,
    2.055529438642871,
    2.0518305164802833,
    2.048407141795244,
    2.045229642132703,
    2.0422724563012373,
];

/// Two-sided 95% Student-t quantile; the normal value past 30 degrees.
pub fn t_quantile_975(df: usize) -> f64 {
    match df {
        0 => f64::INFINITY,
        1..=30 => T975[df - 1],
        _ => 1.959963984540054,
    }
}

/// Mean and 95% half-width `t * s / sqrt(n)` using the sample deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanCi {
    pub mean: f64,
    pub half_width: f64,
}

impl MeanCi {
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.len() < 2 {
            return Err(invalid("need at least two samples for an interval"));
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        Ok(Self {
            mean,
            half_width: t_quantile_975(xs.len() - 1) * libm::sqrt(var) / libm::sqrt(n),
        })
    }
}
