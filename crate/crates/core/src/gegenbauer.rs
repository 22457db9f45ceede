//! Gegenbauer polynomials `G_{d,n}` (parameter `(n-2)/2`) generated by
//! their three-term recurrence, plus root isolation for the derivative
//! `G'_{d,n}` and orthogonality checks by adaptive quadrature.

use thiserror::Error;

use crate::poly::UnivariatePolynomial;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GegenbauerError {
    #[error("invalid key: require d >= 0, n >= 2 (got d={d}, n={n})")]
    Key { d: usize, n: usize },
    #[error("derivative roots require d >= 2 (got d={0})")]
    DegreeTooSmall(usize),
    #[error("root isolation found {found} roots of G'_{{{d},{n}}}, expected {expected}")]
    RootCount {
        d: usize,
        n: usize,
        found: usize,
        expected: usize,
    },
    #[error("orthogonality defect requires d1 != d2 (got {0})")]
    EqualDegrees(usize),
    #[error("weight (1-z^2)^((n-3)/2) requires n >= 3 (got {0})")]
    WeightDimension(usize),
}

/// Degree and ambient dimension identifying one Gegenbauer polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GegenbauerKey {
    pub d: usize,
    pub n: usize,
}

impl GegenbauerKey {
    pub fn new(d: usize, n: usize) -> Result<Self, GegenbauerError> {
        if n < 2 {
            return Err(GegenbauerError::Key { d, n });
        }
        Ok(GegenbauerKey { d, n })
    }
}

/// The `d-1` simple roots of `G'_{d,n}` in `(-1,1)`, sorted ascending,
/// with a simplicity margin `|G''(root)| / |lc(G')|` per root.
#[derive(Debug, Clone)]
pub struct DerivativeRootSet {
    pub key: GegenbauerKey,
    pub roots: Vec<f64>,
    pub simplicity_margins: Vec<f64>,
}

/// Generates `G_{d,n}` by the recurrence
/// `G_0 = 1`, `G_1 = (n-2)x`,
/// `G_d = (1/d)[2x(d + n/2 - 2)G_{d-1} - (d + n - 4)G_{d-2}]`.
pub fn gegenbauer(key: GegenbauerKey) -> UnivariatePolynomial {
    let GegenbauerKey { d, n } = key;
    let mut prev = vec![1.0]; // G_0
    if d == 0 {
        return UnivariatePolynomial::new(prev);
    }
    let mut cur = vec![0.0, (n - 2) as f64]; // G_1
    for k in 2..=d {
        let a = 2.0 * (k as f64 + n as f64 / 2.0 - 2.0) / k as f64;
        let b = (k + n - 4) as f64 / k as f64;
        let mut next = vec![0.0; k + 1];
        for (j, &c) in cur.iter().enumerate() {
            next[j + 1] += a * c;
        }
        for (j, &c) in prev.iter().enumerate() {
            next[j] -= b * c;
        }
        prev = cur;
        cur = next;
    }
    UnivariatePolynomial::new(cur)
}

/// Isolates the simple real roots of `u` in the open interval `(lo, hi)`
/// by sign-change bracketing on a uniform grid, bisection to width 1e-12
/// and one Newton polish step.
///
/// Returns `(root, margin)` pairs sorted ascending, where `margin` is
/// `|u'(root)| / |lc(u)|`. Multiple roots of even order produce no sign
/// change and are not found, which is exactly the failure mode the
/// callers test for.
pub fn isolate_simple_roots(
    u: &UnivariatePolynomial,
    lo: f64,
    hi: f64,
    grid_points: usize,
) -> Vec<(f64, f64)> {
    if u.is_zero() || u.degree() == 0 {
        return vec![];
    }
    let du = u.derivative();
    let lc = u.leading().abs();
    let m = grid_points.max(8);
    let step = (hi - lo) / m as f64;
    let mut out = Vec::new();
    let mut prev_t = lo + step * 0.5;
    let mut prev_v = u.eval(prev_t);
    for i in 1..m {
        let t = lo + step * (i as f64 + 0.5);
        if t >= hi {
            break;
        }
        let v = u.eval(t);
        if prev_v == 0.0 {
            out.push(polish(u, &du, prev_t, lc));
        } else if prev_v * v < 0.0 {
            let (mut a, mut b) = (prev_t, t);
            let mut fa = prev_v;
            while b - a > 1e-12 {
                let mid = 0.5 * (a + b);
                let fm = u.eval(mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa * fm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            out.push(polish(u, &du, 0.5 * (a + b), lc));
        }
        prev_t = t;
        prev_v = v;
    }
    out
}

fn polish(u: &UnivariatePolynomial, du: &UnivariatePolynomial, t: f64, lc: f64) -> (f64, f64) {
    let mut root = t;
    let d1 = du.eval(root);
    if d1 != 0.0 {
        root -= u.eval(root) / d1;
    }
    (root, du.eval(root).abs() / lc)
}

/// All `d-1` roots of `G'_{d,n}` in `(-1,1)`, certified simple.
pub fn derivative_roots(key: GegenbauerKey) -> Result<DerivativeRootSet, GegenbauerError> {
    let GegenbauerKey { d, n } = key;
    if d < 2 {
        return Err(GegenbauerError::DegreeTooSmall(d));
    }
    let g = gegenbauer(key);
    let dg = g.derivative();
    let found = isolate_simple_roots(&dg, -1.0, 1.0, 64 * d);
    if found.len() != d - 1 {
        return Err(GegenbauerError::RootCount {
            d,
            n,
            found: found.len(),
            expected: d - 1,
        });
    }
    Ok(DerivativeRootSet {
        key,
        roots: found.iter().map(|r| r.0).collect(),
        simplicity_margins: found.iter().map(|r| r.1).collect(),
    })
}

/// Adaptive Simpson quadrature with Richardson correction.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Weighted inner product `∫_{-1}^{1} G_{d1,n} G_{d2,n} (1-z²)^{(n-3)/2} dz`,
/// evaluated after the substitution `z = cos φ` which turns the weight into
/// the smooth `sin^{n-2} φ` on `[0, π]` (no endpoint singularity to handle).
fn weighted_inner(d1: usize, d2: usize, n: usize) -> Result<f64, GegenbauerError> {
    if n < 3 {
        return Err(GegenbauerError::WeightDimension(n));
    }
    let g1 = gegenbauer(GegenbauerKey::new(d1, n)?);
    let g2 = gegenbauer(GegenbauerKey::new(d2, n)?);
    let pow = (n - 2) as i32;
    // tolerance scaled by the integrand magnitude; Gegenbauer polynomials
    // attain their maximum on [-1, 1] at the endpoints
    let scale = (g1.eval(1.0) * g2.eval(1.0)).abs() * std::f64::consts::PI;
    let integrand = move |phi: f64| {
        let z = phi.cos();
        g1.eval(z) * g2.eval(z) * phi.sin().powi(pow)
    };
    let tol = 1e-14 * scale.max(1.0);
    // pre-split into enough panels to resolve the oscillation; a single
    // adaptive pass can alias on the symmetric high-degree integrands
    let panels = (d1 + d2 + 4).next_power_of_two();
    let width = std::f64::consts::PI / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let a = k as f64 * width;
        total += adaptive_simpson(&integrand, a, a + width, tol / panels as f64);
    }
    Ok(total)
}

/// Off-diagonal weighted inner product; zero (up to quadrature error) by
/// orthogonality of the Gegenbauer family.
pub fn orthogonality_defect(d1: usize, d2: usize, n: usize) -> Result<f64, GegenbauerError> {
    if d1 == d2 {
        return Err(GegenbauerError::EqualDegrees(d1));
    }
    weighted_inner(d1, d2, n)
}

/// Diagonal norm `∫ G_{d,n}² (1-z²)^{(n-3)/2} dz`, the natural scale for
/// judging an orthogonality defect.
pub fn diagonal_norm(d: usize, n: usize) -> Result<f64, GegenbauerError> {
    weighted_inner(d, d, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(d: usize, n: usize) -> GegenbauerKey {
        GegenbauerKey::new(d, n).unwrap()
    }

    #[test]
    fn recurrence_base_cases() {
        assert_eq!(gegenbauer(key(0, 5)).coeffs(), &[1.0]);
        assert_eq!(gegenbauer(key(1, 4)).coeffs(), &[0.0, 2.0]);
    }

    #[test]
    fn recurrence_degree_two() {
        // n=3: (1/2)[2x·(3/2)·x − 1] = (3x²−1)/2
        assert_eq!(gegenbauer(key(2, 3)).coeffs(), &[-0.5, 0.0, 1.5]);
        // n=4: (1/2)[8x² − 2] = 4x² − 1
        assert_eq!(gegenbauer(key(2, 4)).coeffs(), &[-1.0, 0.0, 4.0]);
    }

    #[test]
    fn legendre_for_n3() {
        // G_{d,3} equals the Legendre polynomial P_d
        let p3 = gegenbauer(key(3, 3));
        assert_eq!(p3.coeffs(), &[0.0, -1.5, 0.0, 2.5]);
        let p5 = gegenbauer(key(5, 3));
        for t in [-0.9_f64, -0.3, 0.2, 0.77] {
            let legendre5 = (63.0 * t.powi(5) - 70.0 * t.powi(3) + 15.0 * t) / 8.0;
            assert!((p5.eval(t) - legendre5).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_is_exact() {
        for d in 0..=12 {
            for n in 3..=8 {
                let g = gegenbauer(key(d, n));
                for (k, &c) in g.coeffs().iter().enumerate() {
                    if k % 2 != d % 2 {
                        assert_eq!(c, 0.0, "G_{{{d},{n}}} coefficient {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn derivative_roots_single() {
        let rs = derivative_roots(key(2, 3)).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert!(rs.roots[0].abs() < 1e-12);
    }

    #[test]
    fn derivative_roots_d3_n3() {
        // G' = (15x²−3)/2, roots ±1/√5
        let rs = derivative_roots(key(3, 3)).unwrap();
        assert_eq!(rs.roots.len(), 2);
        let r = 1.0 / 5.0_f64.sqrt();
        assert!((rs.roots[0] + r).abs() < 1e-12);
        assert!((rs.roots[1] - r).abs() < 1e-12);
    }

    #[test]
    fn derivative_roots_high_degree_symmetric() {
        let rs = derivative_roots(key(12, 8)).unwrap();
        assert_eq!(rs.roots.len(), 11);
        for (i, &r) in rs.roots.iter().enumerate() {
            let opposite = rs.roots[rs.roots.len() - 1 - i];
            assert!((r + opposite).abs() < 1e-10, "negation symmetry at {i}");
        }
    }

    #[test]
    fn derivative_roots_reject_d1() {
        assert!(matches!(
            derivative_roots(key(1, 3)),
            Err(GegenbauerError::DegreeTooSmall(1))
        ));
    }

    #[test]
    fn derivative_root_residuals_small() {
        for d in 2..=12 {
            for n in [3, 5, 8] {
                let g = gegenbauer(key(d, n));
                let dg = g.derivative();
                let scale = dg.max_abs_coeff().max(1.0);
                let rs = derivative_roots(key(d, n)).unwrap();
                for (&r, &m) in rs.roots.iter().zip(&rs.simplicity_margins) {
                    assert!(r > -1.0 && r < 1.0);
                    assert!(dg.eval(r).abs() <= 1e-13 * scale, "residual at d={d} n={n}");
                    assert!(m > 1e-8, "simplicity margin at d={d} n={n}");
                }
            }
        }
    }

    #[test]
    fn interlacing_with_polynomial_roots() {
        for d in 2..=12 {
            for n in 3..=8 {
                let g = gegenbauer(key(d, n));
                let roots_g: Vec<f64> = isolate_simple_roots(&g, -1.0, 1.0, 64 * d)
                    .iter()
                    .map(|r| r.0)
                    .collect();
                assert_eq!(roots_g.len(), d, "G_{{{d},{n}}} root count");
                let rs = derivative_roots(key(d, n)).unwrap();
                for i in 0..d - 1 {
                    assert!(
                        roots_g[i] < rs.roots[i] && rs.roots[i] < roots_g[i + 1],
                        "interlacing fails at d={d} n={n} i={i}"
                    );
                }
            }
        }
    }

    #[test]
    fn orthogonality_trivial_parity_pair() {
        let v = orthogonality_defect(0, 1, 3).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn orthogonality_legendre_pair() {
        let v = orthogonality_defect(1, 3, 3).unwrap();
        let scale = diagonal_norm(1, 3).unwrap().max(diagonal_norm(3, 3).unwrap());
        assert!(v.abs() <= 1e-10 * scale);
    }

    #[test]
    fn orthogonality_n5_pair() {
        let v = orthogonality_defect(2, 4, 5).unwrap();
        let scale = diagonal_norm(2, 5).unwrap().max(diagonal_norm(4, 5).unwrap());
        assert!(v.abs() <= 1e-10 * scale);
    }

    #[test]
    fn orthogonality_rejects_equal_degrees() {
        assert!(matches!(
            orthogonality_defect(3, 3, 4),
            Err(GegenbauerError::EqualDegrees(3))
        ));
    }

    #[test]
    fn double_root_not_found() {
        // u = 3t² has a double root at 0: no sign change, no root reported
        let u = UnivariatePolynomial::new(vec![0.0, 0.0, 3.0]);
        assert!(isolate_simple_roots(&u, -1.0, 1.0, 256).is_empty());
    }
}
