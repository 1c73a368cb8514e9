use alloc::vec;
use alloc::vec::Vec;

use super::{ClassifierConfig, Matrix};

/// Node of a fitted tree; children are indices into [`TreeModel::nodes`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TreeNode {
    Leaf {
        class: usize,
        counts: Vec<usize>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Gini impurity of the node before the split.
        impurity: f64,
        /// Size-weighted Gini impurity of the two children.
        split_impurity: f64,
    },
}

/// CART classification tree: Gini impurity, best single-feature threshold,
/// no pruning. Samples with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeModel {
    pub nodes: Vec<TreeNode>,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p
        })
        .sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &k) in counts.iter().enumerate() {
        if k > counts[best] {
            best = c;
        }
    }
    best
}

struct Candidate {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl TreeModel {
    pub(crate) fn fit(x: &Matrix, y: &[usize], n_classes: usize, config: &ClassifierConfig) -> Self {
        let mut nodes = Vec::new();
        // (node slot, sample indices, depth)
        let mut stack = vec![(0usize, (0..x.rows()).collect::<Vec<_>>(), 0usize)];
        nodes.push(TreeNode::Leaf {
            class: 0,
            counts: Vec::new(),
        });

        while let Some((slot, idx, depth)) = stack.pop() {
            let mut counts = vec![0usize; n_classes];
            idx.iter().for_each(|&i| counts[y[i]] += 1);
            let n = idx.len();
            let impurity = gini(&counts, n);

            let can_split = impurity > 0.0
                && n >= config.min_split
                && n >= 2 * config.min_leaf
                && config.max_depth.is_none_or(|d| depth < d);
            let best = if can_split {
                best_split(x, y, &idx, &counts, n_classes, config.min_leaf)
            } else {
                None
            };

            match best {
                Some(c) if c.impurity < impurity - 1e-12 => {
                    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
                        idx.iter().partition(|&&i| x.row(i)[c.feature] <= c.threshold);
                    let left = nodes.len();
                    let right = left + 1;
                    nodes.push(TreeNode::Leaf {
                        class: 0,
                        counts: Vec::new(),
                    });
                    nodes.push(TreeNode::Leaf {
                        class: 0,
                        counts: Vec::new(),
                    });
                    nodes[slot] = TreeNode::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        left,
                        right,
                        impurity,
                        split_impurity: c.impurity,
                    };
                    stack.push((right, right_idx, depth + 1));
                    stack.push((left, left_idx, depth + 1));
                }
                _ => {
                    nodes[slot] = TreeNode::Leaf {
                        class: majority(&counts),
                        counts,
                    };
                }
            }
        }
        Self { nodes }
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { class, .. } => return *class,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => at = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

fn best_split(
    x: &Matrix,
    y: &[usize],
    idx: &[usize],
    counts: &[usize],
    n_classes: usize,
    min_leaf: usize,
) -> Option<Candidate> {
    let n = idx.len();
    let mut best: Option<Candidate> = None;
    let mut order = idx.to_vec();
    let mut left = vec![0usize; n_classes];
    let mut right = vec![0usize; n_classes];

    for f in 0..x.cols() {
        order.sort_by(|&a, &b| x.row(a)[f].total_cmp(&x.row(b)[f]).then(a.cmp(&b)));
        left.iter_mut().for_each(|c| *c = 0);
        right.copy_from_slice(counts);

        for k in 1..n {
            let moved = y[order[k - 1]];
            left[moved] += 1;
            right[moved] -= 1;
            if k < min_leaf || n - k < min_leaf {
                continue;
            }
            let lo = x.row(order[k - 1])[f];
            let hi = x.row(order[k])[f];
            if lo >= hi {
                continue;
            }
            let weighted = (k as f64 * gini(&left, k) + (n - k) as f64 * gini(&right, n - k)) / n as f64;
            if best.as_ref().is_none_or(|b| weighted < b.impurity) {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi || !threshold.is_finite() {
                    threshold = lo;
                }
                best = Some(Candidate {
                    feature: f,
                    threshold,
                    impurity: weighted,
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ClassifierKind;

    fn cfg() -> ClassifierConfig {
        ClassifierConfig::new(ClassifierKind::DecisionTree)
    }

    #[test]
    fn stump_on_one_feature() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, 0.0]).collect();
        let y: Vec<usize> = (0..20).map(|i| usize::from(i >= 10)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let t = TreeModel::fit(&x, &y, 2, &cfg());
        assert_eq!(t.depth(), 1);
        match &t.nodes[0] {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 9.5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn min_leaf_blocks_small_splits() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let y = vec![0, 1, 0, 0, 0, 0, 0, 0];
        let x = Matrix::from_rows(&rows).unwrap();
        let t = TreeModel::fit(&x, &y, 2, &cfg());
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict(&[1.0]), 0);
    }

    #[test]
    fn splits_reduce_impurity() {
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|i| {
                let t = i as f64;
                vec![libm::sin(t * 0.31), libm::cos(t * 0.17), (i % 7) as f64]
            })
            .collect();
        let y: Vec<usize> = rows
            .iter()
            .map(|r| usize::from(r[0] + 0.3 * r[1] > 0.1) + usize::from(r[2] > 4.0))
            .collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let t = TreeModel::fit(&x, &y, 3, &cfg());
        for node in &t.nodes {
            if let TreeNode::Split {
                impurity,
                split_impurity,
                ..
            } = node
            {
                assert!(split_impurity < impurity);
            }
            if let TreeNode::Leaf { counts, .. } = node {
                assert!(counts.iter().sum::<usize>() >= 5);
            }
        }
    }

    #[test]
    fn max_depth_respected() {
        let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64]).collect();
        let y: Vec<usize> = (0..100).map(|i| (i / 10) % 2).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let mut c = cfg();
        c.max_depth = Some(2);
        assert!(TreeModel::fit(&x, &y, 2, &c).depth() <= 2);
    }
}
