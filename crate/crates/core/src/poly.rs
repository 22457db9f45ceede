//! Sparse homogeneous polynomials in `n` variables and dense univariate
//! polynomials, with the calculus the sphere solver needs: gradients,
//! Hessians, Laplacians, variable inclusion and parity homogenization.
//!
//! All values are immutable after construction and all operations are pure.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("degree mismatch: polynomial has degree {expected}, term has degree {got}")]
    Degree { expected: u32, got: u32 },
    #[error("variable count mismatch: {0} vs {1}")]
    VariableCount(usize, usize),
    #[error("parity violation: degree-{degree} polynomial has a nonzero coefficient at t^{index}")]
    Parity { degree: usize, index: usize },
    #[error("axis {axis} out of range for {n_vars} variables")]
    Axis { axis: usize, n_vars: usize },
}

/// Exponent vector of a single monomial. Ordered graded-lexicographically
/// (total degree first, then lexicographic on exponents), which makes
/// `BTreeMap` iteration the canonical term order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.total_degree(), &self.exps).cmp(&(other.total_degree(), &other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Homogeneous polynomial of fixed total degree in `n_vars` variables,
/// stored as a canonical sparse term map (no explicit zero coefficients).
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPolynomial {
    n_vars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, f64>,
}

impl HomogeneousPolynomial {
    /// The zero polynomial of the given shape.
    pub fn zero(n_vars: usize, degree: u32) -> Self {
        HomogeneousPolynomial {
            n_vars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(n_vars: usize, degree: u32, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = Self::zero(n_vars, degree);
        for (exps, coef) in terms {
            if exps.len() != n_vars {
                return Err(PolyError::Dimension {
                    expected: n_vars,
                    got: exps.len(),
                });
            }
            let m = Monomial::new(exps);
            let td = m.total_degree();
            if td != degree {
                return Err(PolyError::Degree {
                    expected: degree,
                    got: td,
                });
            }
            p.add_term(m, coef);
        }
        Ok(p)
    }

    /// Single monomial `coef * x^exps`.
    pub fn monomial(n_vars: usize, exps: Vec<u32>, coef: f64) -> Result<Self, PolyError> {
        let degree = exps.iter().sum();
        Self::from_terms(n_vars, degree, [(exps, coef)])
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0_f64, |a, &c| a.max(c.abs()))
    }

    fn add_term(&mut self, m: Monomial, coef: f64) {
        use std::collections::btree_map::Entry;
        if coef == 0.0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coef);
            }
        }
    }

    /// Evaluates at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.n_vars {
            return Err(PolyError::Dimension {
                expected: self.n_vars,
                got: x.len(),
            });
        }
        let mut sum = 0.0;
        for (m, c) in self.terms() {
            let mut prod = c;
            for (xi, &e) in x.iter().zip(m.exps()) {
                if e > 0 {
                    prod *= xi.powi(e as i32);
                }
            }
            sum += prod;
        }
        Ok(sum)
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        if self.n_vars != other.n_vars {
            return Err(PolyError::VariableCount(self.n_vars, other.n_vars));
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(PolyError::Degree {
                expected: self.degree,
                got: other.degree,
            });
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let mut out = HomogeneousPolynomial::zero(self.n_vars, degree);
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c);
        }
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = HomogeneousPolynomial::zero(self.n_vars, self.degree);
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        if self.n_vars != other.n_vars {
            return Err(PolyError::VariableCount(self.n_vars, other.n_vars));
        }
        let mut out = HomogeneousPolynomial::zero(self.n_vars, self.degree + other.degree);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                let exps: Vec<u32> = ma
                    .exps()
                    .iter()
                    .zip(mb.exps())
                    .map(|(a, b)| a + b)
                    .collect();
                out.add_term(Monomial::new(exps), ca * cb);
            }
        }
        Ok(out)
    }

    /// Partial derivative with respect to variable `i` (0-based).
    pub fn partial(&self, i: usize) -> Self {
        let degree = self.degree.saturating_sub(1);
        let mut out = HomogeneousPolynomial::zero(self.n_vars, degree);
        for (m, c) in self.terms() {
            let e = m.exps()[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[i] -= 1;
            out.add_term(Monomial::new(exps), c * e as f64);
        }
        out
    }

    /// Gradient vector `(∂f/∂x_1, …, ∂f/∂x_n)`.
    pub fn gradient(&self) -> Vec<Self> {
        (0..self.n_vars).map(|i| self.partial(i)).collect()
    }

    /// Symmetric Hessian matrix of second partials.
    pub fn hessian(&self) -> Vec<Vec<Self>> {
        let grads = self.gradient();
        let mut h: Vec<Vec<Self>> = vec![Vec::with_capacity(self.n_vars); self.n_vars];
        for i in 0..self.n_vars {
            for j in 0..self.n_vars {
                if j < i {
                    let entry = h[j][i].clone();
                    h[i].push(entry);
                } else {
                    h[i].push(grads[i].partial(j));
                }
            }
        }
        h
    }

    /// `Σ_i ∂²f/∂x_i²`; the zero polynomial exactly when `f` is harmonic.
    pub fn laplacian(&self) -> Self {
        let degree = self.degree.saturating_sub(2);
        let mut out = HomogeneousPolynomial::zero(self.n_vars, degree);
        for i in 0..self.n_vars {
            let second = self.partial(i).partial(i);
            for (m, c) in second.terms() {
                out.add_term(m.clone(), c);
            }
        }
        out
    }

    /// Same polynomial viewed in `n_vars + 1` variables (the new last
    /// variable does not occur).
    pub fn include(&self) -> Self {
        let mut out = HomogeneousPolynomial::zero(self.n_vars + 1, self.degree);
        for (m, c) in self.terms() {
            let mut exps = m.exps().to_vec();
            exps.push(0);
            out.add_term(Monomial::new(exps), c);
        }
        out
    }

    /// Gradient evaluated at a point.
    pub fn gradient_at(&self, x: &[f64]) -> Result<Vec<f64>, PolyError> {
        self.gradient().iter().map(|g| g.eval(x)).collect()
    }
}

impl fmt::Display for HomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            if first {
                write!(f, "{c}")?;
                first = false;
            } else if c < 0.0 {
                write!(f, " - {}", -c)?;
            } else {
                write!(f, " + {c}")?;
            }
            for (i, &e) in m.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

/// Parity classification of a univariate polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    None,
}

/// Dense univariate polynomial; `coeffs[k]` is the coefficient of `t^k`.
/// Trailing zeros are trimmed so the leading coefficient is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariatePolynomial {
    coeffs: Vec<f64>,
}

impl UnivariatePolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        UnivariatePolynomial { coeffs }
    }

    pub fn zero() -> Self {
        UnivariatePolynomial { coeffs: vec![] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap_or(&0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |a, &c| a.max(c.abs()))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let d: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        UnivariatePolynomial::new(d)
    }

    pub fn parity(&self) -> Parity {
        let even_ok = self.coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0);
        let odd_ok = self.coeffs.iter().step_by(2).all(|&c| c == 0.0);
        match (even_ok, odd_ok) {
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Even, // zero polynomial
            (false, false) => Parity::None,
        }
    }
}

/// Calls `f` for every way of writing `total` as an ordered sum of
/// `parts` non-negative integers.
fn for_each_composition(total: u32, parts: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(buf: &mut Vec<u32>, remaining: u32, parts_left: usize, f: &mut impl FnMut(&[u32])) {
        if parts_left == 1 {
            buf.push(remaining);
            f(buf);
            buf.pop();
            return;
        }
        for v in 0..=remaining {
            buf.push(v);
            rec(buf, remaining - v, parts_left - 1, f);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(parts);
    rec(&mut buf, total, parts, f);
}

fn multinomial_u32(total: u32, parts: &[u32]) -> f64 {
    debug_assert_eq!(parts.iter().sum::<u32>(), total);
    let fact = |k: u32| -> u128 { (2..=k as u128).product() };
    let mut v = fact(total);
    for &p in parts {
        v /= fact(p);
    }
    v as f64
}

/// Produces the degree-`d` homogeneous polynomial
/// `Σ_k c_{d-2k} · x_axis^{d-2k} · (x_1² + … + x_n²)^k`
/// whose restriction to the unit sphere equals `p(x_axis)`.
///
/// `p` must have the parity of its degree (only terms `t^{d-2k}`),
/// otherwise no homogeneous representative of degree `d` exists.
pub fn homogenize_parity(
    p: &UnivariatePolynomial,
    axis: usize,
    n_vars: usize,
) -> Result<HomogeneousPolynomial, PolyError> {
    if axis >= n_vars {
        return Err(PolyError::Axis { axis, n_vars });
    }
    let d = p.degree();
    for (k, &c) in p.coeffs().iter().enumerate() {
        if c != 0.0 && k % 2 != d % 2 {
            return Err(PolyError::Parity { degree: d, index: k });
        }
    }
    let mut out = HomogeneousPolynomial::zero(n_vars, d as u32);
    for (k, &c) in p.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let half = ((d - k) / 2) as u32;
        // c * x_axis^k * (Σ x_i²)^half
        for_each_composition(half, n_vars, &mut |comp| {
            let coef = c * multinomial_u32(half, comp);
            let mut exps: Vec<u32> = comp.iter().map(|&a| 2 * a).collect();
            exps[axis] += k as u32;
            out.add_term(Monomial::new(exps), coef);
        });
    }
    Ok(out)
}
