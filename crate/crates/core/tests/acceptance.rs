//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `--nocapture` to see them). Tolerances are pinned
//! in the constants below.

use std::sync::OnceLock;
use std::time::Instant;

use eigenreal::construct::{construct, zonal, ConstructionParams, ConstructionResult};
use eigenreal::gegenbauer::{derivative_roots, diagonal_norm, gegenbauer, isolate_simple_roots, orthogonality_defect, GegenbauerKey};
use eigenreal::linalg::{self, Matrix};
use eigenreal::poly::HomogeneousPolynomial;
use eigenreal::solver::{certify, count_eigenpoints, find_critical_points, SolverConfig};
use eigenreal::tensor::{best_rank_one, poly_to_tensor};
use eigenreal::testutil::{gaussian, seeded_rng, unit_vector};

const RESIDUAL_TOL: f64 = 1e-10;
const MARGIN_TOL: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-12;
const ORTHO_REL_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-10;
const RANK1_CROSS_TOL: f64 = 1e-10;
const RANK1_GRID_TOL: f64 = 1e-3;
const FD_STEP: f64 = 1e-5;
const FD_REL_TOL: f64 = 1e-6;

const CASES: [(u32, usize, usize); 5] = [
    (3, 3, 14),
    (4, 3, 26),
    (5, 3, 42),
    (3, 4, 30),
    (4, 4, 80),
];

fn constructions() -> &'static Vec<(u32, usize, ConstructionResult)> {
    static CELL: OnceLock<Vec<(u32, usize, ConstructionResult)>> = OnceLock::new();
    CELL.get_or_init(|| {
        CASES
            .iter()
            .map(|&(d, n, _)| {
                let r = construct(&ConstructionParams::new(d, n))
                    .unwrap_or_else(|e| panic!("construct({d},{n}) failed: {e}"));
                (d, n, r)
            })
            .collect()
    })
}

fn pass(criterion: &str) {
    println!("criterion {criterion}: PASS");
}

#[test]
fn criterion_01_construct_3_3_has_14_points() {
    let start = Instant::now();
    let result = construct(&ConstructionParams::new(3, 3)).expect("construct(3,3)");
    let elapsed = start.elapsed();
    let level = result.final_level();
    assert_eq!(level.certificate.count, 14, "expected 14 critical points");
    assert!(
        level.certificate.max_residual <= RESIDUAL_TOL,
        "max residual {}",
        level.certificate.max_residual
    );
    assert!(
        level.certificate.min_margin >= MARGIN_TOL,
        "min margin {}",
        level.certificate.min_margin
    );
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}, budget 1 minute");
    pass("1 (construct(3,3) certifies 14 points)");
}

#[test]
fn criterion_02_certified_counts() {
    let start = Instant::now();
    for &(d, n, expected) in &CASES {
        let result = construct(&ConstructionParams::new(d, n))
            .unwrap_or_else(|e| panic!("construct({d},{n}) failed: {e}"));
        let level = result.final_level();
        assert_eq!(
            level.certificate.count, expected,
            "count mismatch for (d={d}, n={n})"
        );
        assert_eq!(level.certificate.count as u64, 2 * count_eigenpoints(d, n));
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 900, "took {elapsed:?}, budget 15 minutes");
    pass("2 (counts 14/26/42/30/80 certified)");
}

#[test]
fn criterion_03_count_telescoping() {
    for (d, _, result) in constructions() {
        for w in result.levels.windows(2) {
            let prev = w[0].certificate.count;
            let next = w[1].certificate.count;
            assert_eq!(
                next,
                2 + (*d as usize - 1) * prev,
                "telescoping fails for d={d} at level n={}",
                w[1].n
            );
        }
    }
    pass("3 (count(n+1) = 2 + (d-1)·count(n) on every run)");
}

#[test]
fn criterion_04_harmonic_and_traceless() {
    for (d, n, result) in constructions() {
        for level in &result.levels {
            let lap = level.polynomial.laplacian();
            assert!(
                lap.max_abs_coeff() <= TRACE_TOL,
                "laplacian of (d={d}, level {}) has coefficient {}",
                level.n,
                lap.max_abs_coeff()
            );
            assert!(
                level.tensor.is_traceless(TRACE_TOL),
                "tensor of (d={d}, n={n}, level {}) not traceless",
                level.n
            );
        }
    }
    pass("4 (every level harmonic and traceless at 1e-12)");
}

#[test]
fn criterion_05_gegenbauer_suite() {
    for d in 2..=12usize {
        for n in 3..=8usize {
            let key = GegenbauerKey::new(d, n).unwrap();
            let rs = derivative_roots(key).unwrap_or_else(|e| panic!("{e}"));
            assert_eq!(rs.roots.len(), d - 1);
            for w in rs.roots.windows(2) {
                assert!(w[0] < w[1], "roots not strictly increasing");
            }
            for (i, &r) in rs.roots.iter().enumerate() {
                assert!(r > -1.0 && r < 1.0);
                assert!(
                    (r + rs.roots[rs.roots.len() - 1 - i]).abs() < 1e-10,
                    "negation symmetry at d={d} n={n}"
                );
            }
            for &m in &rs.simplicity_margins {
                assert!(m > MARGIN_TOL, "simplicity margin {m} at d={d} n={n}");
            }
            // interlacing with the d simple roots of G itself
            let g = gegenbauer(key);
            let roots_g: Vec<f64> = isolate_simple_roots(&g, -1.0, 1.0, 64 * d)
                .iter()
                .map(|r| r.0)
                .collect();
            assert_eq!(roots_g.len(), d, "root count of G_{{{d},{n}}}");
            for i in 0..d - 1 {
                assert!(
                    roots_g[i] < rs.roots[i] && rs.roots[i] < roots_g[i + 1],
                    "interlacing fails at d={d} n={n}"
                );
            }
        }
    }
    for n in 3..=8usize {
        for d1 in 0..=12usize {
            for d2 in d1 + 1..=12usize {
                let defect = orthogonality_defect(d1, d2, n).unwrap();
                let scale = diagonal_norm(d1, n)
                    .unwrap()
                    .max(diagonal_norm(d2, n).unwrap());
                assert!(
                    defect.abs() <= ORTHO_REL_TOL * scale,
                    "defect {defect} vs scale {scale} at d1={d1} d2={d2} n={n}"
                );
            }
        }
    }
    pass("5 (Gegenbauer roots, interlacing and orthogonality)");
}

#[test]
fn criterion_06_quadratic_jacobi_oracle() {
    let mut rng = seeded_rng(0xBEEF);
    for n in [3usize, 4, 5] {
        for trial in 0..20 {
            // random symmetric traceless matrix
            let mut b = Matrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let v = gaussian(&mut rng);
                    b.set(i, j, v);
                    b.set(j, i, v);
                }
            }
            let trace: f64 = (0..n).map(|i| b.get(i, i)).sum();
            for i in 0..n {
                b.set(i, i, b.get(i, i) - trace / n as f64);
            }
            let mut terms = Vec::new();
            for i in 0..n {
                for j in i..n {
                    let mut exps = vec![0u32; n];
                    exps[i] += 1;
                    exps[j] += 1;
                    let c = if i == j { b.get(i, i) } else { 2.0 * b.get(i, j) };
                    terms.push((exps, c));
                }
            }
            let f = HomogeneousPolynomial::from_terms(n, 2, terms).unwrap();
            let report = find_critical_points(&f, &SolverConfig::default()).unwrap();
            assert!(
                report.certified,
                "n={n} trial={trial}: {}",
                report.diagnostics
            );
            assert_eq!(report.found_count, 2 * n);

            let eig = linalg::jacobi_eigen(&b);
            let a = poly_to_tensor(&f);
            let pairs = certify(&report, &a).unwrap();
            for (mu, v) in eig.values.iter().zip(&eig.vectors) {
                let matched = pairs.iter().find(|p| {
                    // either sign of the eigenvector is a critical point
                    [1.0, -1.0].iter().any(|s| {
                        p.x.iter()
                            .zip(v)
                            .all(|(a, b)| (a - s * b).abs() <= ORACLE_TOL)
                    })
                });
                let p = matched.unwrap_or_else(|| {
                    panic!("no solver point matches eigenvector {v:?} (n={n}, trial={trial})")
                });
                assert!(
                    (p.lambda - mu).abs() <= ORACLE_TOL * (1.0 + mu.abs()),
                    "eigenvalue mismatch {} vs {mu}",
                    p.lambda
                );
            }
        }
    }
    pass("6 (d=2 eigenpairs match the Jacobi oracle)");
}

#[test]
fn criterion_07_euler_census() {
    for (d, n, result) in constructions() {
        for level in &result.levels {
            let expected = 1 + if (level.n - 1) % 2 == 0 { 1 } else { -1 };
            assert_eq!(
                level.certificate.euler_sum, expected as i64,
                "euler census at d={d} n={n} level {}",
                level.n
            );
        }
    }
    pass("7 (Σ(-1)^index matches χ(S^{n-1}) on every certified report)");
}

#[test]
fn criterion_08_zonal_negative_control() {
    for d in [3u32, 4, 5] {
        let z = zonal(d, 3);
        let report = find_critical_points(&z, &SolverConfig::default()).unwrap();
        assert!(!report.certified, "zonal({d},3) must not certify");
        assert!(
            report.degenerate_detected,
            "zonal({d},3) must flag degeneracy"
        );
        assert!(
            report.degenerate_points.len() >= 10,
            "expected a detected continuum, got {} degenerate points",
            report.degenerate_points.len()
        );
        for p in &report.degenerate_points {
            assert!(p.margin <= MARGIN_TOL, "margin {} on the continuum", p.margin);
        }
    }
    pass("8 (unperturbed zonal harmonics rejected as degenerate)");
}

#[test]
fn criterion_09_rank_one_distance() {
    // (3,3) construction
    let result = constructions()
        .iter()
        .find(|(d, n, _)| (*d, *n) == (3, 3))
        .map(|(_, _, r)| r)
        .unwrap();
    let level = result.final_level();
    let pairs = certify(&level.report, &level.tensor).unwrap();
    let r1 = best_rank_one(&level.tensor, &pairs).unwrap();
    let rel = ((r1.dist * r1.dist) - (r1.dist_direct * r1.dist_direct)).abs()
        / (r1.dist * r1.dist).max(1e-300);
    assert!(rel <= RANK1_CROSS_TOL, "cross-check relative error {rel}");

    // 10^6-point sphere-grid brute force over dist_A
    let fro = level.tensor.frobenius_norm();
    let mut max_f2 = 0.0_f64;
    let grid = 1000usize;
    for i in 0..grid {
        let theta = (i as f64 + 0.5) * std::f64::consts::PI / grid as f64;
        for j in 0..grid {
            let phi = j as f64 * std::f64::consts::TAU / grid as f64;
            let x = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let v = level.polynomial.eval(&x).unwrap();
            max_f2 = max_f2.max(v * v);
        }
    }
    let grid_dist_sq = fro * fro - max_f2;
    assert!(
        (grid_dist_sq - r1.dist * r1.dist).abs() <= RANK1_GRID_TOL,
        "grid minimum {grid_dist_sq} vs formula {}",
        r1.dist * r1.dist
    );

    // x1³ + x2³ fixture on the circle
    let f = HomogeneousPolynomial::from_terms(2, 3, [(vec![3, 0], 1.0), (vec![0, 3], 1.0)])
        .unwrap();
    let a = poly_to_tensor(&f);
    let report = find_critical_points(&f, &SolverConfig::default()).unwrap();
    assert!(report.certified, "{}", report.diagnostics);
    let pairs = certify(&report, &a).unwrap();
    let r1 = best_rank_one(&a, &pairs).unwrap();
    assert!((r1.lambda.abs() - 1.0).abs() < 1e-10);
    assert!((r1.dist - 1.0).abs() < RANK1_CROSS_TOL);
    let fro = a.frobenius_norm();
    let mut max_f2 = 0.0_f64;
    for k in 0..1_000_000usize {
        let th = k as f64 * std::f64::consts::TAU / 1e6;
        let v = f.eval(&[th.cos(), th.sin()]).unwrap();
        max_f2 = max_f2.max(v * v);
    }
    assert!((fro * fro - max_f2 - r1.dist * r1.dist).abs() <= RANK1_GRID_TOL);
    pass("9 (rank-one distance: closed form = direct = grid brute force)");
}

#[test]
fn criterion_10_finite_difference_checks() {
    let mut rng = seeded_rng(0xFD);
    for (d, n, result) in constructions() {
        for level in &result.levels {
            let f = &level.polynomial;
            let nv = f.n_vars();
            let grads = f.gradient();
            let hess = f.hessian();
            for _ in 0..20 {
                let x = unit_vector(&mut rng, nv);
                for i in 0..nv {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += FD_STEP;
                    xm[i] -= FD_STEP;
                    let fd = (f.eval(&xp).unwrap() - f.eval(&xm).unwrap()) / (2.0 * FD_STEP);
                    let an = grads[i].eval(&x).unwrap();
                    assert!(
                        (fd - an).abs() <= FD_REL_TOL * (1.0 + an.abs()),
                        "gradient FD mismatch d={d} n={n} level {} var {i}: {fd} vs {an}",
                        level.n
                    );
                    for j in 0..nv {
                        let fd2 = (grads[j].eval(&xp).unwrap() - grads[j].eval(&xm).unwrap())
                            / (2.0 * FD_STEP);
                        let an2 = hess[i][j].eval(&x).unwrap();
                        assert!(
                            (fd2 - an2).abs() <= FD_REL_TOL * (1.0 + an2.abs()),
                            "hessian FD mismatch d={d} level {} ({i},{j})",
                            level.n
                        );
                    }
                }
            }
        }
    }
    pass("10 (analytic gradient/Hessian match finite differences)");
}
