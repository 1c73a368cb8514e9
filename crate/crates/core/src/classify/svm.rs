use alloc::vec;
use alloc::vec::Vec;

use super::smo::{self, KernelCache, SmoSettings};
use super::{ClassifierConfig, Matrix};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Kernel {
    Linear,
    /// `exp(-gamma |a - b|^2)`
    Rbf {
        gamma: f64,
    },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(p, q)| p * q).sum(),
            Kernel::Rbf { gamma } => {
                let d: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
                libm::exp(-gamma * d)
            }
        }
    }
}

/// One class-pair machine. Positive decision values vote for `positive`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinarySvm {
    pub positive: usize,
    pub negative: usize,
    pub support: Matrix,
    /// `alpha_i * y_i` for each support vector.
    pub coef: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    pub max_violation: f64,
}

impl BinarySvm {
    pub fn decision(&self, kernel: &Kernel, x: &[f64]) -> f64 {
        self.support
            .iter_rows()
            .zip(&self.coef)
            .map(|(sv, c)| c * kernel.eval(sv, x))
            .sum::<f64>()
            - self.rho
    }
}

/// One-vs-one SVM. Ties in the vote go to the class with the larger summed
/// decision value in its favor, then to the lower class index.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmModel {
    pub kernel: Kernel,
    pub n_classes: usize,
    pub machines: Vec<BinarySvm>,
}

impl SvmModel {
    pub(crate) fn fit(
        x: &Matrix,
        y: &[usize],
        n_classes: usize,
        kernel: Kernel,
        config: &ClassifierConfig,
    ) -> Result<Self> {
        let settings = SmoSettings::new(config.cost, config.tolerance);
        let mut present = vec![false; n_classes];
        y.iter().for_each(|&l| present[l] = true);
        let classes: Vec<usize> = (0..n_classes).filter(|&c| present[c]).collect();

        let mut machines = Vec::new();
        for (a_pos, &a) in classes.iter().enumerate() {
            for &b in &classes[a_pos + 1..] {
                machines.push(fit_pair(x, y, a, b, kernel, &settings)?);
            }
        }
        Ok(Self {
            kernel,
            n_classes,
            machines,
        })
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let mut votes = vec![0usize; self.n_classes];
        let mut margin = vec![0.0f64; self.n_classes];
        let mut active = vec![false; self.n_classes];
        for m in &self.machines {
            let d = m.decision(&self.kernel, x);
            active[m.positive] = true;
            active[m.negative] = true;
            if d > 0.0 {
                votes[m.positive] += 1;
            } else {
                votes[m.negative] += 1;
            }
            margin[m.positive] += d;
            margin[m.negative] -= d;
        }
        let mut best: Option<usize> = None;
        for c in (0..self.n_classes).filter(|&c| active[c]) {
            best = match best {
                None => Some(c),
                Some(b) if votes[c] > votes[b] || (votes[c] == votes[b] && margin[c] > margin[b]) => Some(c),
                keep => keep,
            };
        }
        best.expect("at least one machine")
    }
}

fn fit_pair(
    x: &Matrix,
    y: &[usize],
    positive: usize,
    negative: usize,
    kernel: Kernel,
    settings: &SmoSettings,
) -> Result<BinarySvm> {
    let idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == positive || y[i] == negative).collect();
    if idx.is_empty() {
        return Err(invalid("empty class pair"));
    }
    let sub = x.select(&idx);
    let signs: Vec<f64> = idx.iter().map(|&i| if y[i] == positive { 1.0 } else { -1.0 }).collect();
    let mut cache = KernelCache::new(&sub, kernel);
    let sol = smo::solve(&mut cache, &signs, settings);

    let sv: Vec<usize> = (0..idx.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
    Ok(BinarySvm {
        positive,
        negative,
        support: sub.select(&sv),
        coef: sv.iter().map(|&i| sol.alpha[i] * signs[i]).collect(),
        rho: sol.rho,
        iterations: sol.iterations,
        max_violation: sol.max_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{train, ClassifierKind, ModelBody};

    #[test]
    fn three_class_one_vs_one() {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..30 {
            let t = i as f64 / 30.0;
            rows.push(vec![t, 0.0]);
            y.push(0);
            rows.push(vec![5.0 + t, 0.0]);
            y.push(1);
            rows.push(vec![0.0, 5.0 + t]);
            y.push(2);
        }
        let x = Matrix::from_rows(&rows).unwrap();
        for kind in [ClassifierKind::SvmLinear, ClassifierKind::SvmRbf] {
            let m = train(&ClassifierConfig::new(kind), &x, &y, 3).unwrap();
            let ModelBody::Svm(svm) = &m.body else { panic!() };
            assert_eq!(svm.machines.len(), 3);
            assert!(svm.machines.iter().all(|b| b.max_violation < 1e-3));
            assert_eq!(m.predict(&[0.5, 0.0]).unwrap(), 0);
            assert_eq!(m.predict(&[5.5, 0.0]).unwrap(), 1);
            assert_eq!(m.predict(&[0.0, 5.5]).unwrap(), 2);
        }
    }

    #[test]
    fn absent_class_has_no_machine() {
        let x = Matrix::from_rows(&[vec![0.0], vec![0.1], vec![3.0], vec![3.1]]).unwrap();
        let m = train(&ClassifierConfig::new(ClassifierKind::SvmRbf), &x, &[0, 0, 2, 2], 3).unwrap();
        let ModelBody::Svm(svm) = &m.body else { panic!() };
        assert_eq!(svm.machines.len(), 1);
        assert_eq!(m.predict(&[3.05]).unwrap(), 2);
    }
}
