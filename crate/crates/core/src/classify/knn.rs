use alloc::vec::Vec;

use super::Matrix;

/// Brute-force k nearest neighbors under Euclidean distance.
///
/// Neighbors are ranked by `(distance, training index)`. The majority class
/// wins; among tied classes the one owning the nearest neighbor wins. With
/// `k = 2` this means a disagreeing pair falls back to the nearer neighbor.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KnnModel {
    k: usize,
    points: Matrix,
    labels: Vec<usize>,
}

impl KnnModel {
    pub(crate) fn fit(x: &Matrix, y: &[usize], k: usize) -> Self {
        Self {
            k: k.min(x.rows()),
            points: x.clone(),
            labels: y.to_vec(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let mut dist: Vec<(f64, usize)> = self
            .points
            .iter_rows()
            .enumerate()
            .map(|(i, row)| (squared_distance(row, x), i))
            .collect();
        let k = self.k;
        dist.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let nearest = &mut dist[..k];
        nearest.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        // (label, votes, rank of first occurrence)
        let mut tally: Vec<(usize, usize, usize)> = Vec::new();
        for (rank, &(_, i)) in nearest.iter().enumerate() {
            let label = self.labels[i];
            match tally.iter_mut().find(|t| t.0 == label) {
                Some(t) => t.1 += 1,
                None => tally.push((label, 1, rank)),
            }
        }
        tally
            .iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
            .map(|t| t.0)
            .expect("k >= 1")
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn replayed_training_point() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![5.0]]).unwrap();
        let m = KnnModel::fit(&x, &[0, 0, 1], 2);
        assert_eq!(m.predict(&[5.0]), 1);
        assert_eq!(m.predict(&[0.0]), 0);
    }

    #[test]
    fn equidistant_tie_goes_to_lower_index_neighbor() {
        // one member per class, query exactly between them
        let x = Matrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap();
        assert_eq!(KnnModel::fit(&x, &[1, 0], 2).predict(&[0.0]), 1);
        assert_eq!(KnnModel::fit(&x, &[0, 1], 2).predict(&[0.0]), 0);
    }

    #[test]
    fn disagreeing_pair_uses_nearer() {
        let x = Matrix::from_rows(&[vec![0.0], vec![3.0]]).unwrap();
        let m = KnnModel::fit(&x, &[0, 1], 2);
        assert_eq!(m.predict(&[1.0]), 0);
        assert_eq!(m.predict(&[2.0]), 1);
    }

    #[test]
    fn majority_beats_nearest() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.1], vec![1.2]]).unwrap();
        let m = KnnModel::fit(&x, &[0, 1, 1], 3);
        assert_eq!(m.predict(&[0.1]), 1);
    }
}
