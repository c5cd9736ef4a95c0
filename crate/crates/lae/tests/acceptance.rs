//! Acceptance suite: one test per release criterion, each printing a single
//! PASS/FAIL line. Tolerances are pinned here, not tuned elsewhere.

use lae::ilc::{example_plant, ptype_gain, LtiPlant};
use lae::lalg::{Matrix, Vector};
use lae::oracle;
use lae::rng::{random_problem_matrix, Lcg64, RankClass};
use lae::solver::{Certificate, LaeProblem, NilpotentKind, Solvability, SolverConfig};
use std::time::Instant;

fn benchmark_matrix() -> Matrix {
    Matrix::from_rows(&[
        vec![1.0, 3.0, 5.0, 7.0, 2.0],
        vec![2.0, 4.0, 6.0, 1.0, 5.0],
        vec![1.0, 2.0, 5.0, 3.0, 3.0],
        vec![1.0, 2.0, 1.0, -2.0, 2.0],
    ])
    .unwrap()
}

fn benchmark_problem(y_d: Vec<f64>) -> LaeProblem {
    LaeProblem::new(benchmark_matrix(), Vector::new(y_d).unwrap()).unwrap()
}

fn benchmark_config() -> SolverConfig {
    SolverConfig {
        epsilon: 1e-5,
        u0: Some(Vector::new(vec![1.0, 1.0, 0.0, 0.0, 0.0]).unwrap()),
        record_trace: true,
        ..SolverConfig::default()
    }
}

fn report(criterion: &str, violations: &[String], detail: String) {
    if violations.is_empty() {
        println!("acceptance {criterion}: PASS ({detail})");
    } else {
        println!("acceptance {criterion}: FAIL ({})", violations.join("; "));
    }
    assert!(
        violations.is_empty(),
        "{criterion}: {}",
        violations.join("; ")
    );
}

#[test]
fn criterion_1_solvable_case_iterations_and_residual() {
    let started = Instant::now();
    let problem = benchmark_problem(vec![1.0, 0.0, 2.0, -2.0]);
    let gain = problem.sigma_gain(Some(1.0 / 120.0)).unwrap();
    let outcome = problem.solve(&gain, &benchmark_config()).unwrap();
    let elapsed = started.elapsed();

    let mut violations = Vec::new();
    if !(585..=589).contains(&outcome.iterations) {
        violations.push(format!("iterations {} not in 587±2", outcome.iterations));
    }
    if !(8.9e-4..=9.3e-4).contains(&outcome.final_residual) {
        violations.push(format!(
            "residual {} outside [8.9e-4, 9.3e-4]",
            outcome.final_residual
        ));
    }
    if outcome.solvability != Solvability::Solvable {
        violations.push("classified unsolvable".into());
    }
    if elapsed.as_secs_f64() >= 1.0 {
        violations.push(format!("runtime {:?} >= 1s", elapsed));
    }
    report(
        "1 (solvable benchmark case)",
        &violations,
        format!(
            "iterations={}, residual={:.4e}, runtime={:?}",
            outcome.iterations, outcome.final_residual, elapsed
        ),
    );
}

#[test]
fn criterion_2_unsolvable_case_iterations_residual_oracle() {
    let started = Instant::now();
    let problem = benchmark_problem(vec![1.0, 1.0, 2.0, 2.0]);
    let gain = problem.sigma_gain(Some(1.0 / 120.0)).unwrap();
    let outcome = problem.solve(&gain, &benchmark_config()).unwrap();
    let reference = oracle::min_norm_least_squares(problem.g(), problem.y_d()).unwrap();
    let elapsed = started.elapsed();

    let mut violations = Vec::new();
    if !(502..=506).contains(&outcome.iterations) {
        violations.push(format!("iterations {} not in 504±2", outcome.iterations));
    }
    if (outcome.final_residual - 1.7321).abs() > 1e-3 {
        violations.push(format!(
            "residual {} not within 1e-3 of 1.7321",
            outcome.final_residual
        ));
    }
    if outcome.solvability != Solvability::Unsolvable {
        violations.push("classified solvable".into());
    }
    if (reference.residual - 1351.0 / 780.0).abs() > 1e-5 {
        violations.push(format!(
            "oracle residual {} not within 1e-5 of 1351/780",
            reference.residual
        ));
    }
    if elapsed.as_secs_f64() >= 1.0 {
        violations.push(format!("runtime {:?} >= 1s", elapsed));
    }
    report(
        "2 (unsolvable benchmark case)",
        &violations,
        format!(
            "iterations={}, residual={:.6}, oracle residual={:.8}, runtime={:?}",
            outcome.iterations, outcome.final_residual, reference.residual, elapsed
        ),
    );
}

#[test]
fn criterion_3_step_norms_decrease_monotonically() {
    let mut violations = Vec::new();
    for (name, y_d) in [
        ("solvable", vec![1.0, 0.0, 2.0, -2.0]),
        ("unsolvable", vec![1.0, 1.0, 2.0, 2.0]),
    ] {
        let problem = benchmark_problem(y_d);
        let gain = problem.sigma_gain(Some(1.0 / 120.0)).unwrap();
        let outcome = problem.solve(&gain, &benchmark_config()).unwrap();
        let rows = &outcome.trace.as_ref().unwrap().rows;
        for pair in rows.windows(2) {
            if pair[1].step_norm > pair[0].step_norm + 1e-12 {
                violations.push(format!(
                    "{name}: step norm rose at k={} ({} -> {})",
                    pair[1].k, pair[0].step_norm, pair[1].step_norm
                ));
                break;
            }
        }
    }
    report(
        "3 (monotone step norms)",
        &violations,
        "both cases non-increasing at 1e-12".into(),
    );
}

#[test]
fn criterion_4_tracking_experiment_deadbeat_within_thirty() {
    let started = Instant::now();
    let (plant, y_d) = example_plant();
    let mut violations = Vec::new();

    match plant.relative_degree() {
        Ok(1) => {}
        Ok(r) => violations.push(format!("relative degree {r}, expected 1")),
        Err(e) => violations.push(format!("relative degree failed: {e}")),
    }

    let f0 = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
    let f = ptype_gain(&f0, 30);
    let u0: Vec<Vector> = (0..30)
        .map(|_| Vector::new(vec![5.0, 1.0]).unwrap())
        .collect();
    let run = plant.run_ilc(&y_d, &f, &u0, 50).unwrap();
    for k in 30..=50 {
        if run.tracking_errors[k] > 1e-9 {
            violations.push(format!("e_{k} = {} > 1e-9", run.tracking_errors[k]));
        }
    }
    let elapsed = started.elapsed();
    if elapsed.as_secs_f64() >= 5.0 {
        violations.push(format!("runtime {:?} >= 5s", elapsed));
    }
    report(
        "4 (tracking experiment)",
        &violations,
        format!(
            "e_29={:.3e}, max e_k for k>=30 is {:.3e}, runtime={:?}",
            run.tracking_errors[29],
            run.tracking_errors[30..]
                .iter()
                .fold(0.0f64, |m, &e| m.max(e)),
            elapsed
        ),
    );
}

#[test]
fn criterion_5_deadbeat_exact_termination_suite() {
    let mut rng = Lcg64::new(7919);
    let mut violations = Vec::new();
    let config = SolverConfig {
        epsilon: 1e-12,
        ..SolverConfig::default()
    };

    for case in 0..50 {
        let class = [
            RankClass::FullColumn,
            RankClass::FullRow,
            RankClass::Deficient,
        ][case % 3];
        let (g, m) = random_problem_matrix(&mut rng, class, 30);
        let y_d = rng.vector(g.rows());
        let u0 = rng.vector(g.cols());
        let problem = match LaeProblem::new(g, y_d) {
            Ok(p) => p,
            Err(e) => {
                violations.push(format!("case {case}: problem construction failed: {e}"));
                continue;
            }
        };
        for kind in [NilpotentKind::Zero, NilpotentKind::Shift] {
            let expected_nu = match kind {
                NilpotentKind::Zero => 1,
                NilpotentKind::Shift => m,
            };
            let gain = match problem.deadbeat_gain(kind) {
                Ok(g) => g,
                Err(e) => {
                    violations.push(format!("case {case} {kind:?}: gain failed: {e}"));
                    continue;
                }
            };
            if gain.certificate() != Certificate::Nilpotent(expected_nu) {
                violations.push(format!(
                    "case {case} {kind:?}: certificate {} (expected nu={expected_nu})",
                    gain.certificate()
                ));
                continue;
            }
            let outcome = problem
                .solve(
                    &gain,
                    &SolverConfig {
                        u0: Some(u0.clone()),
                        ..config.clone()
                    },
                )
                .unwrap();
            if outcome.iterations != expected_nu {
                violations.push(format!(
                    "case {case} {kind:?}: {} iterations, expected {expected_nu}",
                    outcome.iterations
                ));
            }
            // walk the iteration by hand to bracket the termination point
            let mut u = u0.clone();
            let mut history = vec![u.clone()];
            for _ in 0..=expected_nu {
                u = problem.iterate_once(gain.matrix(), &u).unwrap();
                history.push(u.clone());
            }
            let settle = history[expected_nu + 1]
                .sub(&history[expected_nu])
                .unwrap()
                .norm2();
            if settle > 1e-9 * history[expected_nu].norm2().max(1.0) {
                violations.push(format!(
                    "case {case} {kind:?}: step after nu is {settle:.3e}"
                ));
            }
            let approach = history[expected_nu]
                .sub(&history[expected_nu - 1])
                .unwrap()
                .norm2();
            if approach <= 1e-9 {
                violations.push(format!(
                    "case {case} {kind:?}: step at nu already {approach:.3e}"
                ));
            }
        }
    }
    report(
        "5 (deadbeat termination, 50 seeded problems)",
        &violations,
        "zero kind: exactly 1 iteration; shift kind: exactly rank iterations".into(),
    );
}

#[test]
fn criterion_6_oracle_equivalence_suite() {
    let mut rng = Lcg64::new(60606);
    let mut violations = Vec::new();
    let config = SolverConfig {
        epsilon: 1e-12,
        max_iters: 5_000_000,
        ..SolverConfig::default()
    };
    let mut unsolvable_seen = 0usize;

    for case in 0..100 {
        let class = [
            RankClass::FullColumn,
            RankClass::FullRow,
            RankClass::Deficient,
        ][case % 3];
        let (g, _) = random_problem_matrix(&mut rng, class, 10);
        let y_d = rng.vector(g.rows());
        let problem = LaeProblem::new(g, y_d).unwrap();
        let gain = problem.sigma_gain(None).unwrap();
        let outcome = problem.solve(&gain, &config).unwrap();
        if !outcome.converged {
            violations.push(format!("case {case}: did not converge"));
            continue;
        }
        let reference = match oracle::min_norm_least_squares(problem.g(), problem.y_d()) {
            Ok(r) => r,
            Err(e) => {
                violations.push(format!("case {case}: oracle failed: {e}"));
                continue;
            }
        };
        let gap = outcome.u_inf.sub(&reference.solution).unwrap().norm2();
        let scale = reference.solution.norm2().max(1.0);
        if gap > 1e-6 * scale {
            violations.push(format!(
                "case {case}: oracle gap {:.3e} relative",
                gap / scale
            ));
        }
        if outcome.solvability == Solvability::Unsolvable {
            unsolvable_seen += 1;
            if !oracle::residual_is_minimal(problem.g(), problem.y_d(), &outcome.u_inf, 200) {
                violations.push(format!(
                    "case {case}: residual not minimal under 200 probes"
                ));
            }
        }
    }
    if unsolvable_seen == 0 {
        violations.push("no unsolvable instances generated".into());
    }
    report(
        "6 (oracle equivalence, 100 seeded problems)",
        &violations,
        format!("{unsolvable_seen} unsolvable instances probed with 200 trials each"),
    );
}

#[test]
fn criterion_7_structural_invariants_suite() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let tight = SolverConfig {
        epsilon: 1e-12,
        max_iters: 5_000_000,
        ..SolverConfig::default()
    };
    let tol = 1e-6f64.max(10.0 * tight.epsilon);
    let classes = [
        RankClass::FullColumn,
        RankClass::FullRow,
        RankClass::Deficient,
    ];

    // factorization round-trip
    let mut rng = Lcg64::new(701);
    for case in 0..100 {
        let (g, m) = random_problem_matrix(&mut rng, classes[case % 3], 12);
        match lae::lalg::full_rank_factorization(&g, lae::lalg::DEFAULT_TOL) {
            Ok(f) => {
                let err =
                    f.h.matmul(&f.ghat)
                        .unwrap()
                        .sub(&g)
                        .unwrap()
                        .frobenius_norm();
                if err > 1e-10 * g.frobenius_norm().max(1.0) || f.rank != m {
                    violations.push(format!("factorization case {case}: err {err:.3e}"));
                }
            }
            Err(e) => violations.push(format!("factorization case {case}: {e}")),
        }
    }

    // closed-form limit and output projection
    let mut rng = Lcg64::new(702);
    for case in 0..100 {
        let (g, _) = random_problem_matrix(&mut rng, classes[case % 3], 7);
        let y_d = rng.vector(g.rows());
        let u0 = rng.vector(g.cols());
        let problem = LaeProblem::new(g, y_d).unwrap();
        let gain = problem.sigma_gain(None).unwrap();
        let set = problem.solution_set(&gain).unwrap();
        let expected = set
            .null_projector
            .matvec(&u0)
            .unwrap()
            .add(&set.particular)
            .unwrap();
        let outcome = problem
            .solve(
                &gain,
                &SolverConfig {
                    u0: Some(u0),
                    ..tight.clone()
                },
            )
            .unwrap();
        let gap = outcome.u_inf.sub(&expected).unwrap().norm2();
        if gap > tol {
            violations.push(format!("closed-form case {case}: gap {gap:.3e}"));
        }
        let projection_gap = problem
            .g()
            .matvec(&outcome.u_inf)
            .unwrap()
            .sub(&problem.projected_target())
            .unwrap()
            .norm2();
        if projection_gap > tol {
            violations.push(format!("projection case {case}: gap {projection_gap:.3e}"));
        }
    }

    // nullspace shift
    let mut rng = Lcg64::new(703);
    for case in 0..100 {
        let (g, _) = random_problem_matrix(&mut rng, classes[case % 3], 6);
        let y_d = rng.vector(g.rows());
        let u0 = rng.vector(g.cols());
        let problem = LaeProblem::new(g, y_d).unwrap();
        let gain = problem.sigma_gain(None).unwrap();
        let set = problem.solution_set(&gain).unwrap();
        let gamma = set
            .null_projector
            .matvec(&rng.vector(problem.unknown_dim()))
            .unwrap();
        let base = problem
            .solve(
                &gain,
                &SolverConfig {
                    u0: Some(u0.clone()),
                    ..tight.clone()
                },
            )
            .unwrap();
        let shifted = problem
            .solve(
                &gain,
                &SolverConfig {
                    u0: Some(u0.add(&gamma).unwrap()),
                    ..tight.clone()
                },
            )
            .unwrap();
        let worst = shifted
            .u_inf
            .sub(&base.u_inf)
            .unwrap()
            .sub(&gamma)
            .unwrap()
            .max_abs();
        if worst > tol {
            violations.push(format!("nullspace-shift case {case}: gap {worst:.3e}"));
        }
    }

    // full-column-rank initial-condition independence
    let mut rng = Lcg64::new(704);
    for case in 0..100 {
        let (g, _) = random_problem_matrix(&mut rng, RankClass::FullColumn, 7);
        let y_d = rng.vector(g.rows());
        let problem = LaeProblem::new(g, y_d).unwrap();
        let gain = problem.sigma_gain(None).unwrap();
        let a = problem
            .solve(
                &gain,
                &SolverConfig {
                    u0: Some(rng.vector(problem.unknown_dim())),
                    ..tight.clone()
                },
            )
            .unwrap();
        let b = problem
            .solve(
                &gain,
                &SolverConfig {
                    u0: Some(rng.vector(problem.unknown_dim())),
                    ..tight.clone()
                },
            )
            .unwrap();
        let gap = a.u_inf.sub(&b.u_inf).unwrap().norm2();
        if gap > tol {
            violations.push(format!("u0-independence case {case}: gap {gap:.3e}"));
        }
    }

    // lifted vs time-domain equivalence
    let mut rng = Lcg64::new(705);
    let mut done = 0usize;
    while done < 100 {
        let n_s = rng.next_range(1, 4);
        let n_i = rng.next_range(1, 3);
        let n_o = rng.next_range(1, 3);
        let horizon = rng.next_range(1, 10);
        let a = rng.matrix(n_s, n_s).scale(0.5 / n_s as f64).unwrap();
        let b = rng.matrix(n_s, n_i);
        let c = rng.matrix(n_o, n_s);
        let plant = LtiPlant::new(a, b, c, rng.vector(n_s), horizon).unwrap();
        let Ok(r) = plant.relative_degree() else {
            continue;
        };
        let w = (0..horizon + r - 1).map(|_| rng.vector(n_s)).collect();
        let v = (0..horizon).map(|_| rng.vector(n_o)).collect();
        let plant = plant.with_disturbances(w, v);
        let y_d: Vec<Vector> = (0..horizon).map(|_| rng.vector(n_o)).collect();
        let lifted = plant.lift(&y_d).unwrap();
        let u: Vec<Vector> = (0..horizon).map(|_| rng.vector(n_i)).collect();
        let y_time = Vector::stack(&plant.simulate_time_domain(&u).unwrap());
        let y_lift = lifted
            .g
            .matvec(&Vector::stack(&u))
            .unwrap()
            .add(&lifted.x0_term)
            .unwrap()
            .add(&lifted.d.matvec(&Vector::stack(plant.w())).unwrap())
            .unwrap()
            .add(&Vector::stack(plant.v()))
            .unwrap();
        let gap = y_time.sub(&y_lift).unwrap().max_abs();
        if gap > 1e-9 {
            violations.push(format!("lifting case {done}: gap {gap:.3e}"));
        }
        done += 1;
    }

    let elapsed = started.elapsed();
    if elapsed.as_secs_f64() >= 60.0 {
        violations.push(format!("runtime {:?} >= 60s", elapsed));
    }
    report(
        "7 (structural invariants, 100 seeded instances per family)",
        &violations,
        format!("six families checked, runtime={:?}", elapsed),
    );
}
