use crate::textio::fmt_f64;
use crate::{parse_positive_usize, CliError, Flags};
use lae::rng::{random_matrix_with_rank, Lcg64, RankClass};
use lae::solver::{LaeProblem, NilpotentKind, Solvability, SolverConfig};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

struct Args {
    sizes: Vec<(usize, usize)>,
    classes: Vec<RankClass>,
    seed: u64,
    count: usize,
    out: Option<PathBuf>,
    timings: bool,
}

fn parse_args(raw: &[String]) -> Result<Args, CliError> {
    let mut sizes = Vec::new();
    let mut classes = vec![
        RankClass::FullColumn,
        RankClass::FullRow,
        RankClass::Deficient,
    ];
    let mut seed = 1u64;
    let mut count = 5usize;
    let mut out = None;
    let mut timings = false;

    let mut flags = Flags::new(raw);
    while let Some(flag) = flags.next_flag() {
        match flag {
            "--sizes" => {
                sizes = flags
                    .value(flag)?
                    .split(',')
                    .map(parse_size)
                    .collect::<Result<_, _>>()?;
            }
            "--rank-class" => {
                let raw = flags.value(flag)?;
                let class = RankClass::parse(raw).ok_or_else(|| {
                    CliError::parse(format!(
                        "--rank-class: expected full-col, full-row, or deficient, got '{raw}'"
                    ))
                })?;
                classes = vec![class];
            }
            "--seed" => {
                seed = flags
                    .value(flag)?
                    .parse()
                    .map_err(|_| CliError::parse("--seed: expected an integer"))?;
            }
            "--count" => count = parse_positive_usize(flag, flags.value(flag)?)?,
            "--out" => out = Some(PathBuf::from(flags.value(flag)?)),
            "--timings" => timings = true,
            other => return Err(CliError::parse(format!("unknown flag '{other}'"))),
        }
    }
    if sizes.is_empty() {
        return Err(CliError::parse(
            "--sizes is required (e.g. --sizes 8x12,20x30)",
        ));
    }
    Ok(Args {
        sizes,
        classes,
        seed,
        count,
        out,
        timings,
    })
}

fn parse_size(token: &str) -> Result<(usize, usize), CliError> {
    let (p, q) = token
        .split_once('x')
        .ok_or_else(|| CliError::parse(format!("--sizes: expected PxQ, got '{token}'")))?;
    let p = p
        .parse()
        .map_err(|_| CliError::parse(format!("--sizes: bad row count in '{token}'")))?;
    let q = q
        .parse()
        .map_err(|_| CliError::parse(format!("--sizes: bad column count in '{token}'")))?;
    if p < 2 || q < 2 {
        return Err(CliError::parse("--sizes: each side must be at least 2"));
    }
    Ok((p, q))
}

/// Rank for a class at given dimensions; full-rank classes orient the matrix
/// rather than reject the size.
fn class_dims(class: RankClass, p: usize, q: usize, rng: &mut Lcg64) -> (usize, usize, usize) {
    match class {
        RankClass::FullColumn => {
            let (p, q) = if p >= q { (p, q) } else { (q, p) };
            let p = if p == q { p + 1 } else { p };
            (p, q, q)
        }
        RankClass::FullRow => {
            let (p, q) = if q >= p { (p, q) } else { (q, p) };
            let q = if p == q { q + 1 } else { q };
            (p, q, p)
        }
        RankClass::Deficient => {
            let m = rng.next_range(1, p.min(q) - 1);
            (p, q, m)
        }
    }
}

pub fn run(raw: &[String]) -> Result<(), CliError> {
    let args = parse_args(raw)?;
    let mut rng = Lcg64::new(args.seed);
    let mut csv = String::new();
    csv.push_str("case,p,q,rank_class,rank,gain,solvable,iterations,converged,final_step_norm,final_residual,matvecs,limit_u0_spread");
    if args.timings {
        csv.push_str(",wall_ms");
    }
    csv.push('\n');

    let config = SolverConfig {
        epsilon: 1e-10,
        max_iters: 5_000_000,
        ..SolverConfig::default()
    };

    let mut case = 0usize;
    for &(p_raw, q_raw) in &args.sizes {
        for &class in &args.classes {
            for _ in 0..args.count {
                let (p, q, m) = class_dims(class, p_raw, q_raw, &mut rng);
                let g = random_matrix_with_rank(&mut rng, p, q, m);
                let y_d = rng.vector(p);
                let u0_a = rng.vector(q);
                let u0_b = rng.vector(q);
                let problem = LaeProblem::new(g, y_d)
                    .map_err(|e| CliError::parse(format!("case {case}: {e}")))?;
                let solvable = problem.classify_solvability() == Solvability::Solvable;

                for gain_name in ["sigma", "deadbeat-zero", "deadbeat-shift"] {
                    let gain = match gain_name {
                        "sigma" => problem.sigma_gain(None),
                        "deadbeat-zero" => problem.deadbeat_gain(NilpotentKind::Zero),
                        _ => problem.deadbeat_gain(NilpotentKind::Shift),
                    }
                    .map_err(|e| CliError::parse(format!("case {case} {gain_name}: {e}")))?;

                    let started = Instant::now();
                    let outcome = problem
                        .solve(&gain, &config)
                        .map_err(|e| CliError::parse(format!("case {case} {gain_name}: {e}")))?;
                    let wall = started.elapsed();

                    if gain_name.starts_with("deadbeat") && outcome.iterations > m {
                        return Err(CliError::parse(format!(
                            "case {case} {gain_name}: {} iterations exceeds the rank bound {m}",
                            outcome.iterations
                        )));
                    }

                    // limits from two different starts agree only in the
                    // full-column-rank case; report the spread there
                    let spread = if class == RankClass::FullColumn && gain_name == "sigma" {
                        let a = problem
                            .solve(
                                &gain,
                                &SolverConfig {
                                    u0: Some(u0_a.clone()),
                                    ..config.clone()
                                },
                            )
                            .map_err(|e| CliError::parse(format!("case {case}: {e}")))?;
                        let b = problem
                            .solve(
                                &gain,
                                &SolverConfig {
                                    u0: Some(u0_b.clone()),
                                    ..config.clone()
                                },
                            )
                            .map_err(|e| CliError::parse(format!("case {case}: {e}")))?;
                        fmt_f64(a.u_inf.sub(&b.u_inf).unwrap().norm2())
                    } else {
                        String::new()
                    };

                    let _ = write!(
                        csv,
                        "{case},{p},{q},{},{m},{gain_name},{solvable},{},{},{},{},{},{spread}",
                        class.name(),
                        outcome.iterations,
                        outcome.converged,
                        fmt_f64(outcome.final_step_norm),
                        fmt_f64(outcome.final_residual),
                        2 * outcome.iterations + 1,
                    );
                    if args.timings {
                        let _ = write!(csv, ",{}", wall.as_millis());
                    }
                    csv.push('\n');
                }
                case += 1;
            }
        }
    }

    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
            println!("wrote {case} cases to {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}
