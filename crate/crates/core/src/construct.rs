//! Inductive construction of harmonic polynomials with the maximum number
//! of critical points on the sphere: a trigonometric base case on S¹, a
//! zonal term per lifted dimension and an ε-perturbation whose size is
//! chosen automatically by re-certifying with the sphere solver.

use thiserror::Error;

use crate::gegenbauer::{self, GegenbauerKey};
use crate::poly::{homogenize_parity, HomogeneousPolynomial, Parity, UnivariatePolynomial};
use crate::solver::{self, SolveReport, SolverConfig};
use crate::tensor::{poly_to_tensor, SymmetricTensor};

#[derive(Error, Debug, Clone)]
pub enum ConstructError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("level {level} failed to certify: {diagnostics}")]
    LevelFailed { level: usize, diagnostics: String },
    #[error(
        "epsilon schedule exhausted at level {level} without certification; last attempt (ε={last_epsilon}): {diagnostics}"
    )]
    EpsilonExhausted {
        level: usize,
        last_epsilon: f64,
        diagnostics: String,
    },
}

/// Parameters of the full construction run.
#[derive(Debug, Clone)]
pub struct ConstructionParams {
    pub d: u32,
    pub n_target: usize,
    pub eps_start: f64,
    pub eps_ratio: f64,
    pub eps_floor: f64,
    /// Phase (a, b) of the base trigonometric polynomial a·cos(dθ) + b·sin(dθ).
    pub base_phase: (f64, f64),
    pub seed: u64,
    pub solver: SolverConfig,
}

impl ConstructionParams {
    pub fn new(d: u32, n_target: usize) -> Self {
        ConstructionParams {
            d,
            n_target,
            eps_start: 0.1,
            eps_ratio: 0.5,
            eps_floor: 1e-6,
            base_phase: (1.0, 0.0),
            seed: solver::DEFAULT_SEED,
            solver: SolverConfig::default(),
        }
    }

    fn validate(&self) -> Result<(), ConstructError> {
        if self.d < 1 {
            return Err(ConstructError::Argument("degree must be >= 1".into()));
        }
        if self.n_target < 2 {
            return Err(ConstructError::Argument("dimension must be >= 2".into()));
        }
        if self.base_phase == (0.0, 0.0) {
            return Err(ConstructError::Argument("base phase (a,b) must be nonzero".into()));
        }
        if !(self.eps_start > 0.0 && self.eps_ratio > 0.0 && self.eps_ratio < 1.0
            && self.eps_floor > 0.0 && self.eps_floor <= self.eps_start)
        {
            return Err(ConstructError::Argument("epsilon schedule must be positive and strictly decreasing".into()));
        }
        Ok(())
    }

    fn schedule(&self) -> Vec<f64> {
        let mut eps = self.eps_start;
        let mut out = Vec::new();
        while eps >= self.eps_floor {
            out.push(eps);
            eps *= self.eps_ratio;
        }
        out
    }

    fn level_config(&self, level: usize) -> SolverConfig {
        let mut cfg = self.solver.clone();
        cfg.seed = self
            .seed
            .wrapping_add((level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        cfg
    }
}

/// Count certificate summarizing one certified solver run.
#[derive(Debug, Clone)]
pub struct CountCertificate {
    pub count: usize,
    pub expected: usize,
    pub min_margin: f64,
    pub max_residual: f64,
    pub euler_sum: i64,
}

impl CountCertificate {
    fn from_report(r: &SolveReport) -> Self {
        CountCertificate {
            count: r.found_count,
            expected: r.expected_count,
            min_margin: r
                .points
                .iter()
                .map(|p| p.nondegeneracy_margin)
                .fold(f64::INFINITY, f64::min),
            max_residual: r.points.iter().map(|p| p.residual).fold(0.0, f64::max),
            euler_sum: r.euler_sum,
        }
    }
}

/// One certified level of the induction.
#[derive(Debug, Clone)]
pub struct LevelResult {
    pub n: usize,
    pub polynomial: HomogeneousPolynomial,
    pub tensor: SymmetricTensor,
    /// Perturbation size; absent at the base level.
    pub epsilon: Option<f64>,
    pub certificate: CountCertificate,
    pub report: SolveReport,
}

/// Result of a full run: one certified level per dimension.
#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub d: u32,
    pub levels: Vec<LevelResult>,
}

impl ConstructionResult {
    pub fn final_level(&self) -> &LevelResult {
        self.levels.last().expect("construction has at least one level")
    }
}

/// The harmonic degree-`d` polynomial in two variables restricting to
/// `a·cos(dθ) + b·sin(dθ)` under `x1 = sinθ, x2 = cosθ`; realized as
/// `a·Re((x2 + i x1)^d) + b·Im((x2 + i x1)^d)`.
pub fn base_m_d2(d: u32, a: f64, b: f64) -> Result<HomogeneousPolynomial, ConstructError> {
    if (a, b) == (0.0, 0.0) {
        return Err(ConstructError::Argument("base phase (a,b) must be nonzero".into()));
    }
    if d < 1 {
        return Err(ConstructError::Argument("degree must be >= 1".into()));
    }
    let mut re = HomogeneousPolynomial::zero(2, d);
    let mut im = HomogeneousPolynomial::zero(2, d);
    let mut binom = 1.0_f64;
    for k in 0..=d {
        if k > 0 {
            binom *= (d - k + 1) as f64 / k as f64;
        }
        // (i x1)^k contributes to Re for even k, Im for odd k
        let sign = if k % 4 >= 2 { -1.0 } else { 1.0 };
        let term =
            HomogeneousPolynomial::monomial(2, vec![k, d - k], sign * binom).expect("valid term");
        if k % 2 == 0 {
            re = re.add(&term).expect("same shape");
        } else {
            im = im.add(&term).expect("same shape");
        }
    }
    Ok(re.scale(a).add(&im.scale(b)).expect("same shape"))
}

/// The zonal harmonic about the `x_n` axis: the degree-`d` homogeneous
/// harmonic polynomial restricting to `G_{d,n}(x_n)` on the sphere.
pub fn zonal(d: u32, n: usize) -> HomogeneousPolynomial {
    let key = GegenbauerKey::new(d as usize, n).expect("n >= 2");
    let g = gegenbauer::gegenbauer(key);
    homogenize_parity(&g, n - 1, n).expect("Gegenbauer parity matches its degree")
}

/// One induction step: `Z_{d,n+1} + ε · M̂_{d,n}`.
pub fn lift(m: &HomogeneousPolynomial, epsilon: f64) -> HomogeneousPolynomial {
    let d = m.degree();
    let n = m.n_vars();
    zonal(d, n + 1)
        .add(&m.include().scale(epsilon))
        .expect("zonal and inclusion share degree and dimension")
}

fn certified_level(
    polynomial: HomogeneousPolynomial,
    n: usize,
    epsilon: Option<f64>,
    cfg: &SolverConfig,
) -> Result<LevelResult, String> {
    let report = solver::find_critical_points(&polynomial, cfg).map_err(|e| e.to_string())?;
    if !report.certified {
        return Err(report.diagnostics.clone());
    }
    let tensor = poly_to_tensor(&polynomial);
    let certificate = CountCertificate::from_report(&report);
    Ok(LevelResult {
        n,
        polynomial,
        tensor,
        epsilon,
        certificate,
        report,
    })
}

fn lift_with_schedule(
    level: usize,
    base: impl Fn(f64) -> HomogeneousPolynomial,
    params: &ConstructionParams,
) -> Result<LevelResult, ConstructError> {
    let cfg = params.level_config(level);
    let mut last_eps = params.eps_start;
    let mut last_diag = String::from("no epsilon attempted");
    for eps in params.schedule() {
        last_eps = eps;
        match certified_level(base(eps), level, Some(eps), &cfg) {
            Ok(result) => return Ok(result),
            Err(diag) => last_diag = diag,
        }
    }
    Err(ConstructError::EpsilonExhausted {
        level,
        last_epsilon: last_eps,
        diagnostics: last_diag,
    })
}

/// Runs the induction from `n = 2` to `n_target`, certifying every level.
///
/// `d = 1` is handled directly: the polynomial `x_n` has the two poles as
/// its critical points and no perturbation is involved.
pub fn construct(params: &ConstructionParams) -> Result<ConstructionResult, ConstructError> {
    params.validate()?;
    let d = params.d;

    if d == 1 {
        let n = params.n_target;
        let mut exps = vec![0u32; n];
        exps[n - 1] = 1;
        let f = HomogeneousPolynomial::monomial(n, exps, 1.0).expect("linear monomial");
        let level = certified_level(f, n, None, &params.level_config(n))
            .map_err(|diagnostics| ConstructError::LevelFailed { level: n, diagnostics })?;
        return Ok(ConstructionResult { d, levels: vec![level] });
    }

    let (a, b) = params.base_phase;
    let base = base_m_d2(d, a, b)?;
    let mut levels = vec![certified_level(base, 2, None, &params.level_config(2))
        .map_err(|diagnostics| ConstructError::LevelFailed { level: 2, diagnostics })?];

    for n in 3..=params.n_target {
        let prev = levels.last().unwrap().polynomial.clone();
        let level = lift_with_schedule(n, |eps| lift(&prev, eps), params)?;
        levels.push(level);
    }
    Ok(ConstructionResult { d, levels })
}

/// Result of one generalized lift step.
#[derive(Debug, Clone)]
pub struct GeneralizedResult {
    pub polynomial: HomogeneousPolynomial,
    pub epsilon: f64,
    pub certificate: CountCertificate,
    pub report: SolveReport,
}

/// The closing generalization of the lift step: any parity-`d` univariate
/// `p` whose derivative has `d-1` simple roots in `(-1,1)` can replace the
/// Gegenbauer polynomial, and any polynomial `f` certified with `2m_{d,n}`
/// critical points can replace `M_{d,n}`.
pub fn generalized_construct(
    p: &UnivariatePolynomial,
    f: &HomogeneousPolynomial,
    params: &ConstructionParams,
) -> Result<GeneralizedResult, ConstructError> {
    params.validate()?;
    let d = p.degree();
    if f.degree() as usize != d {
        return Err(ConstructError::Precondition(format!(
            "degree mismatch: p has degree {d}, f has degree {}",
            f.degree()
        )));
    }
    let expected_parity = if d % 2 == 0 { Parity::Even } else { Parity::Odd };
    if p.parity() != expected_parity {
        return Err(ConstructError::Precondition(format!(
            "p must have the parity of its degree {d}"
        )));
    }
    let dp = p.derivative();
    let roots = gegenbauer::isolate_simple_roots(&dp, -1.0, 1.0, 64 * d.max(1));
    if roots.len() != d - 1 {
        return Err(ConstructError::Precondition(format!(
            "p' must have {} simple roots in (-1,1), found {}",
            d - 1,
            roots.len()
        )));
    }
    if let Some((r, m)) = roots.iter().find(|(_, m)| *m <= 1e-8) {
        return Err(ConstructError::Precondition(format!(
            "root {r} of p' is not certifiably simple (margin {m})"
        )));
    }

    let n = f.n_vars();
    let base_cfg = params.level_config(n);
    let base_report = solver::find_critical_points(f, &base_cfg)
        .map_err(|e| ConstructError::Precondition(e.to_string()))?;
    if !base_report.certified {
        return Err(ConstructError::Precondition(format!(
            "f is not certified with 2m critical points: {}",
            base_report.diagnostics
        )));
    }

    let homog = homogenize_parity(p, n, n + 1)
        .map_err(|e| ConstructError::Precondition(e.to_string()))?;
    let level = lift_with_schedule(
        n + 1,
        |eps| {
            homog
                .add(&f.include().scale(eps))
                .expect("shared degree and dimension")
        },
        params,
    )?;
    Ok(GeneralizedResult {
        polynomial: level.polynomial,
        epsilon: level.epsilon.expect("lifted level has an epsilon"),
        certificate: level.certificate,
        report: level.report,
    })
}
