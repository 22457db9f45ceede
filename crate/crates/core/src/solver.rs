//! Enumeration and certification of the critical points of a homogeneous
//! polynomial restricted to the unit sphere.
//!
//! The solver runs seeded multistart Riemannian Newton on the projected
//! gradient `P_x ∇f`, clusters converged points, computes Morse indices
//! from the projected Hessian `P_x(∇²f - λI)P_x` and checks the found
//! count against the closed-form bound `2 m_{d,n}`. It is a verifier for
//! constructed inputs, not a general-purpose complete real solver.

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{self, Matrix};
use crate::poly::HomogeneousPolynomial;
use crate::tensor::{eigen_residual, EigenPair, SymmetricTensor};
use crate::testutil::{seeded_rng, unit_vector};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SolverError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("point is not critical (projected gradient norm {0})")]
    NotCritical(f64),
    #[error("degenerate critical point: nondegeneracy margin {margin} <= {tol}")]
    DegenerateCriticalPoint { margin: f64, tol: f64 },
    #[error("report is not certified; eigenpair extraction requires a certified report")]
    Uncertified,
    #[error("certification failed: {0}")]
    Certification(String),
}

/// Knobs of the multistart Newton solver.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub starts_per_expected_point: usize,
    pub max_newton_iters: usize,
    pub grad_tol: f64,
    pub cluster_angle_tol: f64,
    pub nondegeneracy_tol: f64,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            starts_per_expected_point: 50,
            max_newton_iters: 100,
            grad_tol: 1e-12,
            cluster_angle_tol: 1e-6,
            nondegeneracy_tol: 1e-8,
            seed: DEFAULT_SEED,
        }
    }
}

/// A certified nondegenerate critical point of `f` on the sphere.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub x: Vec<f64>,
    pub value: f64,
    /// Lagrange multiplier; equals `d * value` by the Euler identity, and
    /// `d` times the tensor eigenvalue.
    pub lagrange_lambda: f64,
    pub morse_index: usize,
    pub nondegeneracy_margin: f64,
    pub residual: f64,
}

/// A converged point whose projected Hessian is numerically singular.
#[derive(Debug, Clone)]
pub struct DegeneratePoint {
    pub x: Vec<f64>,
    pub residual: f64,
    pub margin: f64,
}

/// Outcome of a full multistart enumeration.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub points: Vec<CriticalPoint>,
    pub degenerate_points: Vec<DegeneratePoint>,
    pub expected_count: usize,
    pub found_count: usize,
    pub euler_sum: i64,
    pub certified: bool,
    pub degenerate_detected: bool,
    pub diagnostics: String,
}

/// Generic eigenpoint count `m_{d,n} = (d-1)^{n-1} + … + (d-1) + 1`,
/// computed in summation form so `d = 2` needs no special case.
pub fn count_eigenpoints(d: u32, n: usize) -> u64 {
    let base = (d as u64).saturating_sub(1);
    let mut sum = 0u64;
    let mut pow = 1u64; // base^0, also right for d = 1
    for _ in 0..n {
        sum += pow;
        pow *= base;
    }
    sum
}

struct SphereProblem {
    n: usize,
    f: HomogeneousPolynomial,
    grads: Vec<HomogeneousPolynomial>,
    hess: Vec<Vec<HomogeneousPolynomial>>,
}

impl SphereProblem {
    fn new(f: &HomogeneousPolynomial) -> Self {
        SphereProblem {
            n: f.n_vars(),
            f: f.clone(),
            grads: f.gradient(),
            hess: f.hessian(),
        }
    }

    fn grad_at(&self, x: &[f64]) -> Vec<f64> {
        self.grads.iter().map(|g| g.eval(x).unwrap()).collect()
    }

    fn hess_at(&self, x: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.hess[i][j].eval(x).unwrap();
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    /// Projected gradient `∇f - <∇f,x> x` and its Lagrange multiplier.
    fn tangent_grad(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let g = self.grad_at(x);
        let lam = linalg::dot(&g, x);
        let gt: Vec<f64> = g.iter().zip(x).map(|(gi, xi)| gi - lam * xi).collect();
        (gt, lam)
    }

    /// Projected Hessian `P (∇²f - λI) P` at `x`.
    fn projected_hessian(&self, x: &[f64], lam: f64) -> Matrix {
        let n = self.n;
        let h = self.hess_at(x);
        let mut m = h;
        for i in 0..n {
            let v = m.get(i, i) - lam;
            m.set(i, i, v);
        }
        let mx = m.matvec(x);
        let alpha = linalg::dot(&mx, x);
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j) - x[i] * mx[j] - mx[i] * x[j] + alpha * x[i] * x[j];
                out.set(i, j, v);
            }
        }
        out
    }

    fn newton_from(&self, start: &[f64], cfg: &SolverConfig) -> Option<(Vec<f64>, f64)> {
        let mut x = start.to_vec();
        for _ in 0..cfg.max_newton_iters {
            let (gt, lam) = self.tangent_grad(&x);
            let res = linalg::norm(&gt);
            if res <= cfg.grad_tol {
                return Some((x, res));
            }
            let mut b = self.projected_hessian(&x, lam);
            // pin the radial direction so the tangent system is square
            for i in 0..self.n {
                for j in 0..self.n {
                    let v = b.get(i, j) + x[i] * x[j];
                    b.set(i, j, v);
                }
            }
            let rhs: Vec<f64> = gt.iter().map(|v| -v).collect();
            let mut step = match linalg::solve(&b, &rhs) {
                Some(v) => {
                    // stay in the tangent space
                    let r = linalg::dot(&v, &x);
                    v.iter().zip(&x).map(|(vi, xi)| vi - r * xi).collect()
                }
                None => gt.iter().map(|v| -0.1 * v).collect::<Vec<f64>>(),
            };
            let sn = linalg::norm(&step);
            if !sn.is_finite() {
                return None;
            }
            if sn > 0.5 {
                let f = 0.5 / sn;
                for s in &mut step {
                    *s *= f;
                }
            }
            // backtracking on the residual norm
            let mut best_x = None;
            let mut best_res = f64::INFINITY;
            let mut factor = 1.0;
            for _ in 0..4 {
                let cand: Vec<f64> = linalg::normalize(
                    &x.iter()
                        .zip(&step)
                        .map(|(xi, si)| xi + factor * si)
                        .collect::<Vec<f64>>(),
                );
                let (cgt, _) = self.tangent_grad(&cand);
                let cres = linalg::norm(&cgt);
                if cres < best_res {
                    best_res = cres;
                    best_x = Some(cand);
                }
                if cres < res {
                    break;
                }
                factor *= 0.5;
            }
            x = best_x?;
        }
        let (gt, _) = self.tangent_grad(&x);
        let res = linalg::norm(&gt);
        if res <= cfg.grad_tol {
            Some((x, res))
        } else {
            None
        }
    }

    /// Three plain Newton steps to re-polish a cluster representative.
    fn polish(&self, x: &[f64]) -> Vec<f64> {
        let mut x = x.to_vec();
        for _ in 0..3 {
            let (gt, lam) = self.tangent_grad(&x);
            let mut b = self.projected_hessian(&x, lam);
            for i in 0..self.n {
                for j in 0..self.n {
                    let v = b.get(i, j) + x[i] * x[j];
                    b.set(i, j, v);
                }
            }
            let rhs: Vec<f64> = gt.iter().map(|v| -v).collect();
            if let Some(v) = linalg::solve(&b, &rhs) {
                let r = linalg::dot(&v, &x);
                let step: Vec<f64> = v.iter().zip(&x).map(|(vi, xi)| vi - r * xi).collect();
                if linalg::norm(&step) < 0.1 {
                    x = linalg::normalize(
                        &x.iter()
                            .zip(&step)
                            .map(|(xi, si)| xi + si)
                            .collect::<Vec<f64>>(),
                    );
                }
            }
        }
        x
    }

    /// Tangent-space spectrum at a point: (morse index, margin, λ).
    ///
    /// The projected Hessian always has `x` in its kernel; the eigenvalue
    /// whose eigenvector aligns with `x` is discarded and the remaining
    /// `n-1` eigenvalues classify the point.
    fn tangent_spectrum(&self, x: &[f64]) -> (usize, f64, f64) {
        let (_, lam) = self.tangent_grad(x);
        let b = self.projected_hessian(x, lam);
        let eig = linalg::jacobi_eigen(&b);
        let mut radial = 0usize;
        let mut best = -1.0;
        for (k, v) in eig.vectors.iter().enumerate() {
            let a = linalg::dot(v, x).abs();
            if a > best {
                best = a;
                radial = k;
            }
        }
        let mut index = 0usize;
        let mut margin = f64::INFINITY;
        for (k, &val) in eig.values.iter().enumerate() {
            if k == radial {
                continue;
            }
            if val < 0.0 {
                index += 1;
            }
            margin = margin.min(val.abs());
        }
        if !margin.is_finite() {
            margin = 0.0;
        }
        (index, margin, lam)
    }
}

fn angular_distance(a: &[f64], b: &[f64]) -> f64 {
    linalg::dot(a, b).clamp(-1.0, 1.0).acos()
}

/// Finds and certifies all critical points of `f` on `S^{n-1}`.
pub fn find_critical_points(
    f: &HomogeneousPolynomial,
    config: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    if f.is_zero() || f.degree() == 0 {
        return Err(SolverError::ZeroPolynomial);
    }
    let problem = SphereProblem::new(f);
    let n = problem.n;
    let d = f.degree();
    let expected = 2 * count_eigenpoints(d, n) as usize;
    let num_starts = config.starts_per_expected_point.max(10) * expected;

    let mut rng = seeded_rng(config.seed);
    let starts: Vec<Vec<f64>> = (0..num_starts).map(|_| unit_vector(&mut rng, n)).collect();

    let mut converged: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .filter_map(|s| problem.newton_from(s, config))
        .collect();

    // canonical order before clustering keeps parallel and serial runs identical
    converged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    // single-linkage clustering at the angular threshold
    let mut cluster_id: Vec<usize> = (0..converged.len()).collect();
    fn find(ids: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while ids[r] != r {
            r = ids[r];
        }
        let mut c = i;
        while ids[c] != c {
            let next = ids[c];
            ids[c] = r;
            c = next;
        }
        r
    }
    for i in 0..converged.len() {
        for j in i + 1..converged.len() {
            if angular_distance(&converged[i].0, &converged[j].0) <= config.cluster_angle_tol {
                let ri = find(&mut cluster_id, i);
                let rj = find(&mut cluster_id, j);
                if ri != rj {
                    cluster_id[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut reps: Vec<(Vec<f64>, f64)> = Vec::new();
    {
        use std::collections::BTreeMap;
        let mut best: BTreeMap<usize, (Vec<f64>, f64)> = BTreeMap::new();
        for i in 0..converged.len() {
            let root = find(&mut cluster_id, i);
            let entry = best.entry(root).or_insert_with(|| converged[i].clone());
            if converged[i].1 < entry.1 {
                *entry = converged[i].clone();
            }
        }
        reps.extend(best.into_values());
    }

    let mut points = Vec::new();
    let mut degenerate = Vec::new();
    for (x, _) in reps {
        let x = problem.polish(&x);
        let (gt, lam) = problem.tangent_grad(&x);
        let res = linalg::norm(&gt);
        let (index, margin, _) = problem.tangent_spectrum(&x);
        if margin <= config.nondegeneracy_tol {
            degenerate.push(DegeneratePoint {
                x,
                residual: res,
                margin,
            });
        } else {
            let value = problem.f.eval(&x).unwrap();
            points.push(CriticalPoint {
                x,
                value,
                lagrange_lambda: lam,
                morse_index: index,
                nondegeneracy_margin: margin,
                residual: res,
            });
        }
    }
    points.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap_or(std::cmp::Ordering::Equal));
    degenerate.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap_or(std::cmp::Ordering::Equal));

    let found_count = points.len();
    let euler_sum: i64 = points
        .iter()
        .map(|p| if p.morse_index % 2 == 0 { 1 } else { -1 })
        .sum();
    let euler_expected: i64 = 1 + if (n - 1) % 2 == 0 { 1 } else { -1 };
    let degenerate_detected = !degenerate.is_empty();
    let continuum_suspected = degenerate.len() >= 10;
    let max_residual = points.iter().map(|p| p.residual).fold(0.0_f64, f64::max);
    let certified = !degenerate_detected
        && found_count == expected
        && euler_sum == euler_expected
        && max_residual <= config.grad_tol;

    let mut diagnostics = format!(
        "found {found_count}/{expected} nondegenerate critical points, euler sum {euler_sum} (expected {euler_expected})"
    );
    if degenerate_detected {
        diagnostics.push_str(&format!(
            "; {} degenerate point(s) with margin <= {}",
            degenerate.len(),
            config.nondegeneracy_tol
        ));
    }
    if continuum_suspected {
        diagnostics.push_str("; degenerate continuum suspected");
    }

    Ok(SolveReport {
        points,
        degenerate_points: degenerate,
        expected_count: expected,
        found_count,
        euler_sum,
        certified,
        degenerate_detected,
        diagnostics,
    })
}

/// Morse index and nondegeneracy margin of `f` at a certified critical
/// point `x`.
pub fn morse_index(
    f: &HomogeneousPolynomial,
    x: &[f64],
) -> Result<(usize, f64), SolverError> {
    let problem = SphereProblem::new(f);
    let (gt, _) = problem.tangent_grad(x);
    let res = linalg::norm(&gt);
    let scale = f.max_abs_coeff().max(1.0);
    if res > 1e-8 * scale {
        return Err(SolverError::NotCritical(res));
    }
    let (index, margin, _) = problem.tangent_spectrum(x);
    let tol = SolverConfig::default().nondegeneracy_tol;
    if margin <= tol {
        return Err(SolverError::DegenerateCriticalPoint { margin, tol });
    }
    Ok((index, margin))
}

/// Converts the points of a certified report into tensor eigenpairs with
/// `λ = lagrange_lambda / d`, re-checking each residual and, for nonzero
/// eigenvalues, the fixed-point property `A x^{d-1} / ‖·‖ = ±x`.
pub fn certify(report: &SolveReport, a: &SymmetricTensor) -> Result<Vec<EigenPair>, SolverError> {
    if !report.certified {
        return Err(SolverError::Uncertified);
    }
    let d = a.order() as f64;
    let mut pairs = Vec::with_capacity(report.points.len());
    for p in &report.points {
        let x = linalg::normalize(&p.x);
        let lambda = p.lagrange_lambda / d;
        let residual = eigen_residual(a, &x, lambda)
            .map_err(|e| SolverError::Certification(e.to_string()))?;
        if residual > 1e-10 {
            return Err(SolverError::Certification(format!(
                "eigen residual {residual} exceeds 1e-10 at x = {x:?}"
            )));
        }
        if lambda.abs() > 1e-8 {
            let ax = a
                .apply(&x)
                .map_err(|e| SolverError::Certification(e.to_string()))?;
            let axn = linalg::norm(&ax);
            let dir = linalg::dot(&ax, &x) / axn;
            let dev = (dir.abs() - 1.0).abs();
            if dev > 1e-8 {
                return Err(SolverError::Certification(format!(
                    "fixed-point deviation {dev} at x = {x:?}"
                )));
            }
        }
        pairs.push(EigenPair {
            x,
            lambda,
            residual,
        });
    }
    Ok(pairs)
}
