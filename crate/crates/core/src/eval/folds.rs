use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::features::LabeledDataset;

pub const FOLDS: usize = 5;

/// Assignment of every dataset row to one of [`FOLDS`] test folds.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldPlan {
    seed: u64,
    ids: Vec<String>,
    assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fold_count(&self) -> usize {
        FOLDS
    }

    /// Test fold of row `i`.
    pub fn fold_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    /// Trajectory ids held out in `fold`.
    pub fn fold_ids(&self, fold: usize) -> Vec<&str> {
        self.test_indices(fold)
            .into_iter()
            .map(|i| self.ids[i].as_str())
            .collect()
    }

    pub fn fold_sizes(&self) -> [usize; FOLDS] {
        let mut sizes = [0; FOLDS];
        self.assignment.iter().for_each(|&f| sizes[f] += 1);
        sizes
    }

    /// True when the plan was made for exactly these rows, in this order.
    pub fn matches(&self, dataset: &LabeledDataset) -> bool {
        self.ids.len() == dataset.len() && self.ids.iter().zip(dataset.rows()).all(|(a, r)| *a == r.id)
    }
}

/// Stratified random partition into five folds.
///
/// Each class is shuffled with a seeded ChaCha8 stream (classes in sorted
/// order) and dealt round-robin. The dealing offset carries over from one
/// class to the next, so total fold sizes also differ by at most one.
pub fn make_folds(dataset: &LabeledDataset, seed: u64) -> Result<FoldPlan> {
    let labels = dataset.labels();
    let counts = dataset.class_counts();
    for (c, &n) in counts.iter().enumerate() {
        if n < FOLDS {
            return Err(invalid(alloc::format!(
                "class `{}` has {n} members, need at least {FOLDS}",
                dataset.classes()[c]
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut offset = 0;
    for (c, &n) in counts.iter().enumerate() {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        members.shuffle(&mut rng);
        for (j, &i) in members.iter().enumerate() {
            assignment[i] = (offset + j) % FOLDS;
        }
        offset = (offset + n) % FOLDS;
    }

    Ok(FoldPlan {
        seed,
        ids: dataset.rows().iter().map(|r| r.id.clone()).collect(),
        assignment,
    })
}
