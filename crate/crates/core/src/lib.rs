//! Construction and numerical certification of real symmetric tensors
//! all of whose eigenpoints are real, equivalently harmonic homogeneous
//! polynomials with the maximum finite number of critical points on the
//! unit sphere.
//!
//! The pipeline: [`construct`] builds the polynomial level by level
//! (trigonometric base case, zonal term from [`gegenbauer`], automatic
//! ε-perturbation), [`solver`] enumerates and certifies the critical
//! points by multistart Riemannian Newton, and [`tensor`] bridges to the
//! symmetric-tensor side (eigenpairs, tracelessness, best rank-one
//! approximation).

pub mod construct;
pub mod gegenbauer;
pub mod io;
pub mod linalg;
pub mod poly;
pub mod solver;
pub mod tensor;

#[doc(hidden)]
pub mod testutil;
