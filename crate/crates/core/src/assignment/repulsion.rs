use crate::topology::Point;

/// Pairwise repulsion score between items (UEs). Implementations must be
/// symmetric, non-negative, and zero on the diagonal.
pub trait RepulsionFunction: Sync {
    fn len(&self) -> usize;

    fn repulsion(&self, a: usize, b: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Euclidean distance between feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Euclidean {
    features: Vec<Vec<f64>>,
}

impl Euclidean {
    pub fn new(features: Vec<Vec<f64>>) -> Self {
        Euclidean { features }
    }

    pub fn from_points(points: &[Point]) -> Self {
        Euclidean {
            features: points.iter().map(|p| p.to_vec()).collect(),
        }
    }

    /// Points on a line.
    pub fn from_scalars(values: &[f64]) -> Self {
        Euclidean {
            features: values.iter().map(|&v| vec![v]).collect(),
        }
    }
}

impl RepulsionFunction for Euclidean {
    fn len(&self) -> usize {
        self.features.len()
    }

    fn repulsion(&self, a: usize, b: usize) -> f64 {
        self.features[a]
            .iter()
            .zip(&self.features[b])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// Dense cache of all pairwise scores.
#[derive(Debug, Clone)]
pub(crate) struct PairwiseScores {
    n: usize,
    values: Vec<f64>,
}

impl PairwiseScores {
    pub(crate) fn new<F: RepulsionFunction + ?Sized>(f: &F) -> Self {
        let n = f.len();
        let mut values = vec![0.0; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                let v = f.repulsion(a, b);
                values[a * n + b] = v;
                values[b * n + a] = v;
            }
        }
        PairwiseScores { n, values }
    }

    #[inline]
    pub(crate) fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.n + b]
    }

    /// Objective of a label vector: sum of scores of same-label pairs.
    pub(crate) fn score_of_labels(&self, labels: &[usize]) -> f64 {
        let mut total = 0.0;
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if labels[a] == labels[b] {
                    total += self.get(a, b);
                }
            }
        }
        total
    }
}
