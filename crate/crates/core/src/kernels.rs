//! RBF-mixture similarity matrices and the weighted DPP likelihood kernel.
//!
//! The similarity between two embeddings is a sum of Gaussian kernels over a
//! fixed bandwidth set, `S_ij = sum_g exp(-g * ||x_i - x_j||^2)`. The mixture
//! is strictly positive-definite, so the Gram matrix is full rank for
//! distinct points and the admissible subset size is not capped by the
//! feature dimension (a linear kernel would cap it at `d`).
//!
//! Every entry is a pure function of the two rows involved and is computed
//! with a fixed operation order, so row-parallel construction is
//! deterministic and the matrix is symmetric bit-for-bit.

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::feature_store::FeatureTable;

/// Default bandwidth set for the RBF mixture.
pub const DEFAULT_GAMMAS: [f64; 5] = [0.001, 0.01, 0.1, 1.0, 10.0];

/// Ordered set of positive RBF bandwidth parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    gammas: Vec<f64>,
}

impl GammaSet {
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::Validation("gamma set must be non-empty".into()));
        }
        if let Some(g) = gammas.iter().find(|g| !g.is_finite() || **g <= 0.0) {
            return Err(Error::Validation(format!("gamma {g} is not positive")));
        }
        Ok(Self { gammas })
    }

    pub fn values(&self) -> &[f64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// Kernel value at squared distance `d2`.
    fn eval(&self, d2: f64) -> f64 {
        self.gammas.iter().map(|g| (-g * d2).exp()).sum()
    }
}

impl Default for GammaSet {
    fn default() -> Self {
        Self { gammas: DEFAULT_GAMMAS.to_vec() }
    }
}

impl std::str::FromStr for GammaSet {
    type Err = Error;

    /// Parses a comma-separated list of positive reals.
    fn from_str(s: &str) -> Result<Self> {
        let gammas = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Validation(format!("bad gamma `{part}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        GammaSet::new(gammas)
    }
}

impl std::fmt::Display for GammaSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let strs: Vec<String> = self.gammas.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

/// Similarity matrix of one table under an RBF mixture.
///
/// Symmetric, entries in `(0, |G|]`, diagonal exactly `|G|`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    s: Array2<f64>,
    gamma_set: GammaSet,
}

impl GramMatrix {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.s
    }

    pub fn gamma_set(&self) -> &GammaSet {
        &self.gamma_set
    }

    pub fn len(&self) -> usize {
        self.s.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.s.nrows() == 0
    }
}

/// Weighted DPP likelihood kernel `L_ij = sqrt(w_i w_j) * S_ij`.
///
/// Symmetric and positive semi-definite; row and column `i` are identically
/// zero exactly when `w_i = 0`.
#[derive(Debug, Clone)]
pub struct LikelihoodKernel {
    l: Array2<f64>,
    source_weights: Vec<f64>,
}

impl LikelihoodKernel {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.l
    }

    pub fn source_weights(&self) -> &[f64] {
        &self.source_weights
    }

    pub fn len(&self) -> usize {
        self.l.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.l.nrows() == 0
    }
}

/// Squared Euclidean distance by pairwise expansion, clamped at zero to kill
/// negative round-off.
#[inline]
fn squared_distance(norm_a: f64, norm_b: f64, dot: f64) -> f64 {
    (norm_a + norm_b - 2.0 * dot).max(0.0)
}

#[inline]
fn dot(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn row_norms(features: &Array2<f64>) -> Vec<f64> {
    features.rows().into_iter().map(|r| dot(r, r)).collect()
}

/// RBF-mixture Gram matrix `S_ij = sum_g exp(-g * ||x_i - x_j||^2)`.
pub fn rbf_mixture_gram(table: &FeatureTable, gammas: &GammaSet) -> Result<GramMatrix> {
    let n = table.len();
    let features = table.features();
    let norms = row_norms(features);
    let diag = gammas.len() as f64;

    let mut s = Array2::zeros((n, n));
    s.axis_iter_mut(ndarray::Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let xi = features.row(i);
            for j in 0..n {
                row[j] = if i == j {
                    diag
                } else {
                    gammas.eval(squared_distance(norms[i], norms[j], dot(xi, features.row(j))))
                };
            }
        });

    Ok(GramMatrix { s, gamma_set: gammas.clone() })
}

/// Applies instance weights to a Gram matrix: `L_ij = sqrt(w_i w_j) * S_ij`.
pub fn weighted_likelihood(gram: &GramMatrix, weights: &[f64]) -> Result<LikelihoodKernel> {
    let n = gram.len();
    if weights.len() != n {
        return Err(Error::Validation(format!(
            "{} weights for a {n}x{n} gram matrix",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::Validation(format!("invalid weight {w}")));
    }
    let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut l = gram.matrix().clone();
    for i in 0..n {
        for j in 0..n {
            l[[i, j]] *= sqrt_w[i] * sqrt_w[j];
        }
    }
    Ok(LikelihoodKernel { l, source_weights: weights.to_vec() })
}

/// Cross-domain kernel block: entry `(i, j)` is the mixture kernel between
/// row `i` of `a` and row `j` of `b`.
pub fn cross_gram(a: &FeatureTable, b: &FeatureTable, gammas: &GammaSet) -> Result<Array2<f64>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let fa = a.features();
    let fb = b.features();
    let norms_a = row_norms(fa);
    let norms_b = row_norms(fb);

    let mut k = Array2::zeros((a.len(), b.len()));
    k.axis_iter_mut(ndarray::Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let xi = fa.row(i);
            for j in 0..b.len() {
                row[j] = gammas.eval(squared_distance(norms_a[i], norms_b[j], dot(xi, fb.row(j))));
            }
        });
    Ok(k)
}
