//! Symmetric tensors in compact sorted-multi-index storage and the
//! correspondence with homogeneous polynomials: contraction `Ax^{d-1}`,
//! eigen-residuals, partial traces and best rank-one approximation.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::poly::{HomogeneousPolynomial, PolyError};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum TensorError {
    #[error("dimension mismatch: tensor dimension {expected}, vector length {got}")]
    Dimension { expected: usize, got: usize },
    #[error("vector is not unit length (norm {0})")]
    Normalization(f64),
    #[error("eigenpair list is empty")]
    Empty,
    #[error("rank-one distance cross-check failed: formula {formula}, direct {direct}")]
    DistanceMismatch { formula: f64, direct: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Real symmetric tensor of order `d` and dimension `n`, storing one value
/// per sorted multi-index `i_1 <= … <= i_d` (0-based internally). All
/// permuted positions share that value by symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensor {
    order: u32,
    dim: usize,
    entries: BTreeMap<Vec<usize>, f64>,
}

impl SymmetricTensor {
    pub fn zero(order: u32, dim: usize) -> Self {
        SymmetricTensor {
            order,
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    /// Sets the value shared by all permutations of `idx` (any order).
    pub fn set(&mut self, idx: &[usize], value: f64) {
        assert_eq!(idx.len(), self.order as usize);
        assert!(idx.iter().all(|&i| i < self.dim));
        let mut key = idx.to_vec();
        key.sort_unstable();
        if value == 0.0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }

    /// Value at an arbitrary (not necessarily sorted) full index.
    pub fn get(&self, idx: &[usize]) -> f64 {
        let mut key = idx.to_vec();
        key.sort_unstable();
        *self.entries.get(&key).unwrap_or(&0.0)
    }

    /// Number of distinct permutations of a sorted multi-index.
    pub fn multiplicity(idx: &[usize]) -> f64 {
        let mut v = factorial(idx.len() as u32);
        let mut run = 1u32;
        for w in 1..idx.len() {
            if idx[w] == idx[w - 1] {
                run += 1;
            } else {
                v /= factorial(run);
                run = 1;
            }
        }
        v /= factorial(run);
        v as f64
    }

    /// Frobenius norm over the full `n^d` array, computed from the compact
    /// storage via permutation multiplicities.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries()
            .map(|(k, v)| Self::multiplicity(k) * v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Contraction `Ax^{d-1}`, computed as `∇f_A(x) / d` (equal by the
    /// Euler identity applied to the polynomial correspondence).
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, TensorError> {
        if x.len() != self.dim {
            return Err(TensorError::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        let f = tensor_to_poly(self);
        let g = f.gradient_at(x)?;
        let d = self.order as f64;
        Ok(g.iter().map(|v| v / d).collect())
    }

    /// All partial traces `Σ_i a_{i i j_3 … j_d}`, one per sorted choice of
    /// the trailing `d-2` indices.
    pub fn partial_traces(&self) -> Vec<f64> {
        if self.order < 2 {
            return vec![];
        }
        let rest_len = self.order as usize - 2;
        let mut traces = Vec::new();
        let mut rest = vec![0usize; rest_len];
        loop {
            let mut s = 0.0;
            for i in 0..self.dim {
                let mut idx = Vec::with_capacity(self.order as usize);
                idx.push(i);
                idx.push(i);
                idx.extend_from_slice(&rest);
                s += self.get(&idx);
            }
            traces.push(s);
            // next sorted tuple (combination with repetition)
            let mut pos = rest_len;
            loop {
                if pos == 0 {
                    return traces;
                }
                pos -= 1;
                if rest[pos] + 1 < self.dim {
                    rest[pos] += 1;
                    for q in pos + 1..rest_len {
                        rest[q] = rest[pos];
                    }
                    break;
                }
            }
        }
    }

    /// True iff every partial trace is within `tol` of zero; equivalent to
    /// harmonicity of the corresponding polynomial.
    pub fn is_traceless(&self, tol: f64) -> bool {
        assert!(self.order >= 2);
        self.partial_traces().iter().all(|t| t.abs() <= tol)
    }
}

fn factorial(k: u32) -> u128 {
    (2..=k as u128).product()
}

/// `d! / (e_1! ⋯ e_n!)` computed exactly in integers (d ≤ 33 fits u128;
/// results here are far below 2^53, so the f64 conversion is exact).
fn multinomial_of_exps(d: u32, exps: &[u32]) -> f64 {
    let mut v = factorial(d);
    for &e in exps {
        v /= factorial(e);
    }
    v as f64
}

/// Correspondence `f ↔ A`: the tensor entry on a multi-index with exponent
/// pattern `e` is `coef(e) / multinomial(d; e)`, so that
/// `f(x) = Σ a_{i_1…i_d} x_{i_1} ⋯ x_{i_d}` reproduces `f` exactly.
pub fn poly_to_tensor(f: &HomogeneousPolynomial) -> SymmetricTensor {
    let d = f.degree();
    let mut t = SymmetricTensor::zero(d, f.n_vars());
    for (m, c) in f.terms() {
        let mut idx = Vec::with_capacity(d as usize);
        for (var, &e) in m.exps().iter().enumerate() {
            for _ in 0..e {
                idx.push(var);
            }
        }
        t.set(&idx, c / multinomial_of_exps(d, m.exps()));
    }
    t
}

/// Inverse of [`poly_to_tensor`].
pub fn tensor_to_poly(a: &SymmetricTensor) -> HomogeneousPolynomial {
    let mut terms = Vec::new();
    for (idx, v) in a.entries() {
        let mut exps = vec![0u32; a.dim()];
        for &i in idx {
            exps[i] += 1;
        }
        let coef = v * multinomial_of_exps(a.order(), &exps);
        terms.push((exps, coef));
    }
    HomogeneousPolynomial::from_terms(a.dim(), a.order(), terms)
        .expect("tensor entries have uniform order")
}

/// Residual `‖Ax^{d-1} - λx‖₂` of a candidate eigenpair at a unit vector.
pub fn eigen_residual(a: &SymmetricTensor, x: &[f64], lambda: f64) -> Result<f64, TensorError> {
    let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(TensorError::Normalization(norm));
    }
    let ax = a.apply(x)?;
    Ok(ax
        .iter()
        .zip(x)
        .map(|(av, xv)| (av - lambda * xv).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// A certified eigenpair `Ax^{d-1} = λx` with `‖x‖ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub x: Vec<f64>,
    pub lambda: f64,
    pub residual: f64,
}

impl EigenPair {
    /// Equivalent representative with the first nonzero coordinate
    /// positive; for odd order the eigenvalue flips with the sign.
    pub fn canonical(&self, order: u32) -> EigenPair {
        let flip = self
            .x
            .iter()
            .find(|v| v.abs() > 1e-12)
            .map(|v| *v < 0.0)
            .unwrap_or(false);
        if !flip {
            return self.clone();
        }
        EigenPair {
            x: self.x.iter().map(|v| -v).collect(),
            lambda: if order % 2 == 1 { -self.lambda } else { self.lambda },
            residual: self.residual,
        }
    }
}

/// Best rank-one approximation extracted from a complete eigenpair list.
#[derive(Debug, Clone)]
pub struct RankOneResult {
    pub lambda: f64,
    pub x: Vec<f64>,
    /// Distance by the closed form `sqrt(‖A‖_F² - λ²)`.
    pub dist: f64,
    /// Distance by direct summation of `dist_A` over the full index range.
    pub dist_direct: f64,
    /// True when two non-equivalent eigenpairs tie in `|λ|` within 1e-12.
    pub tie: bool,
}

/// Direct evaluation of `dist_A(λ x^{⊗d}) = Σ (a_{i_1…i_d} - λ x_{i_1}⋯x_{i_d})²`
/// over all `n^d` index tuples.
pub fn dist_direct(a: &SymmetricTensor, lambda: f64, x: &[f64]) -> f64 {
    let d = a.order() as usize;
    let n = a.dim();
    let mut idx = vec![0usize; d];
    let mut sum = 0.0;
    loop {
        let mut prod = lambda;
        for &i in &idx {
            prod *= x[i];
        }
        let diff = a.get(&idx) - prod;
        sum += diff * diff;
        let mut pos = d;
        loop {
            if pos == 0 {
                return sum;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Picks the eigenpair of greatest `|λ|` and reports the rank-one distance
/// both in closed form and by direct evaluation, cross-checked to 1e-10
/// relative.
pub fn best_rank_one(
    a: &SymmetricTensor,
    pairs: &[EigenPair],
) -> Result<RankOneResult, TensorError> {
    if pairs.is_empty() {
        return Err(TensorError::Empty);
    }
    // antipodal pairs describe the same rank-one tensor; canonicalize first
    let mut canon: Vec<EigenPair> = pairs.iter().map(|p| p.canonical(a.order())).collect();
    canon.sort_by(|p, q| {
        p.x.partial_cmp(&q.x)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    canon.dedup_by(|p, q| {
        p.x.iter()
            .zip(&q.x)
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>()
            .sqrt()
            < 1e-8
    });
    let max_abs = canon
        .iter()
        .map(|p| p.lambda.abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut best: Vec<&EigenPair> = canon
        .iter()
        .filter(|p| (p.lambda.abs() - max_abs).abs() <= 1e-12)
        .collect();
    best.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap_or(std::cmp::Ordering::Equal));
    let tie = best.len() > 1;
    let chosen = best[0];

    let fro = a.frobenius_norm();
    let dist_sq = (fro * fro - chosen.lambda * chosen.lambda).max(0.0);
    let dist = dist_sq.sqrt();
    let direct = dist_direct(a, chosen.lambda, &chosen.x).max(0.0).sqrt();
    let scale = (fro * fro).max(1e-300);
    if ((dist * dist) - (direct * direct)).abs() > 1e-10 * scale {
        return Err(TensorError::DistanceMismatch {
            formula: dist,
            direct,
        });
    }
    Ok(RankOneResult {
        lambda: chosen.lambda,
        x: chosen.x.clone(),
        dist,
        dist_direct: direct,
        tie,
    })
}
