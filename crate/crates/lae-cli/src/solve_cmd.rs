use crate::textio::{self, fmt_f64};
use crate::{parse_positive_f64, parse_positive_usize, CliError, Flags};
use lae::lalg::Vector;
use lae::oracle;
use lae::solver::{GainSpec, LaeProblem, NilpotentKind, Solvability, SolverConfig, SolverError};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq)]
enum GainFamily {
    Sigma,
    Deadbeat,
    Custom,
}

struct Args {
    problem: PathBuf,
    gain_spec_raw: String,
    epsilon: f64,
    residual_epsilon: f64,
    u0: Option<PathBuf>,
    max_iters: usize,
    trace: Option<PathBuf>,
    verify: bool,
    solution_set: bool,
}

fn parse_args(raw: &[String]) -> Result<Args, CliError> {
    let mut problem = None;
    let mut gain = "sigma".to_string();
    let mut epsilon = 1e-5;
    let mut residual_epsilon = 1e-3;
    let mut u0 = None;
    let mut max_iters = 1_000_000;
    let mut trace = None;
    let mut verify = false;
    let mut solution_set = false;

    let mut flags = Flags::new(raw);
    while let Some(flag) = flags.next_flag() {
        match flag {
            "--problem" => problem = Some(PathBuf::from(flags.value(flag)?)),
            "--gain" => gain = flags.value(flag)?.to_string(),
            "--epsilon" => epsilon = parse_positive_f64(flag, flags.value(flag)?)?,
            "--residual-epsilon" => {
                residual_epsilon = parse_positive_f64(flag, flags.value(flag)?)?
            }
            "--u0" => {
                let value = flags.value(flag)?;
                u0 = (value != "zero").then(|| PathBuf::from(value));
            }
            "--max-iters" => max_iters = parse_positive_usize(flag, flags.value(flag)?)?,
            "--trace" => trace = Some(PathBuf::from(flags.value(flag)?)),
            "--verify" => verify = true,
            "--solution-set" => solution_set = true,
            other => return Err(CliError::parse(format!("unknown flag '{other}'"))),
        }
    }
    Ok(Args {
        problem: problem.ok_or_else(|| CliError::parse("--problem is required"))?,
        gain_spec_raw: gain,
        epsilon,
        residual_epsilon,
        u0,
        max_iters,
        trace,
        verify,
        solution_set,
    })
}

fn parse_gain_spec(raw: &str) -> Result<(GainFamily, GainSpec), CliError> {
    if raw == "sigma" {
        return Ok((GainFamily::Sigma, GainSpec::SigmaTranspose { sigma: None }));
    }
    if let Some(value) = raw.strip_prefix("sigma:") {
        let sigma = parse_positive_f64("--gain sigma", value)?;
        return Ok((
            GainFamily::Sigma,
            GainSpec::SigmaTranspose { sigma: Some(sigma) },
        ));
    }
    match raw {
        "deadbeat" | "deadbeat:zero" => {
            return Ok((
                GainFamily::Deadbeat,
                GainSpec::Deadbeat {
                    kind: NilpotentKind::Zero,
                },
            ))
        }
        "deadbeat:shift" => {
            return Ok((
                GainFamily::Deadbeat,
                GainSpec::Deadbeat {
                    kind: NilpotentKind::Shift,
                },
            ))
        }
        _ => {}
    }
    if let Some(path) = raw.strip_prefix("custom:") {
        let f = textio::read_matrix(Path::new(path)).map_err(|e| CliError::parse(e.to_string()))?;
        return Ok((GainFamily::Custom, GainSpec::Custom { f }));
    }
    Err(CliError::parse(format!(
        "--gain: expected sigma[:V], deadbeat[:zero|shift], or custom:<file>, got '{raw}'"
    )))
}

fn load_problem(path: &Path) -> Result<LaeProblem, CliError> {
    let blocks = textio::read_blocks(path).map_err(|e| CliError::parse(e.to_string()))?;
    if blocks.len() != 2 {
        return Err(CliError::parse(format!(
            "{}: expected two blocks (matrix G then vector Y_d), found {}",
            path.display(),
            blocks.len()
        )));
    }
    let g = blocks[0].clone();
    let y_d =
        textio::column_vector(path, &blocks[1]).map_err(|e| CliError::parse(e.to_string()))?;
    LaeProblem::new(g, y_d).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

pub fn run(raw: &[String]) -> Result<(), CliError> {
    let args = parse_args(raw)?;
    let problem = load_problem(&args.problem)?;
    let (family, spec) = parse_gain_spec(&args.gain_spec_raw)?;

    let gain = problem.gain(&spec).map_err(|e| match e {
        SolverError::SigmaOutOfRange { .. } => CliError::gain(e.to_string()),
        SolverError::GainShape { .. } => CliError::parse(e.to_string()),
        other => CliError::gain(other.to_string()),
    })?;

    let solvability = problem.classify_solvability();
    // least-squares semantics need property (P); exact solving does not
    if solvability == Solvability::Unsolvable && !gain.property_p() {
        return Err(CliError::gain(
            "problem is unsolvable and the gain violates property (P); \
             the iteration limit would not be a least-squares solution",
        ));
    }
    if gain.diverging() {
        eprintln!(
            "warning: spectral estimate suggests divergence ({})",
            gain.certificate()
        );
    }

    let u0 = match &args.u0 {
        Some(path) => Some(textio::read_vector(path).map_err(|e| CliError::parse(e.to_string()))?),
        None => None,
    };
    let config = SolverConfig {
        epsilon: args.epsilon,
        residual_epsilon: args.residual_epsilon,
        max_iters: args.max_iters,
        u0,
        record_trace: args.trace.is_some(),
    };
    let outcome = problem.solve(&gain, &config).map_err(|e| match e {
        SolverError::NonFinite { .. } => CliError::no_convergence(e.to_string()),
        other => CliError::parse(other.to_string()),
    })?;

    println!(
        "problem: p={} q={} rank={}",
        problem.output_dim(),
        problem.unknown_dim(),
        problem.rank()
    );
    println!(
        "solvability: {}{}",
        solvability,
        if solvability == Solvability::Unsolvable {
            " (least-squares mode)"
        } else {
            ""
        }
    );
    println!(
        "gain: {} property-p={} certificate={}",
        args.gain_spec_raw,
        gain.property_p(),
        gain.certificate()
    );
    println!("iterations: {}", outcome.iterations);
    println!("converged: {}", outcome.converged);
    println!("final step norm: {}", fmt_f64(outcome.final_step_norm));
    println!("residual: {}", fmt_f64(outcome.final_residual));
    let probe = if outcome.final_residual < config.residual_epsilon {
        "within"
    } else {
        "above"
    };
    println!(
        "residual probe: {} epsilon-tilde ({})",
        probe,
        fmt_f64(config.residual_epsilon)
    );
    let u_inf: Vec<String> = outcome
        .u_inf
        .entries()
        .iter()
        .map(|&v| fmt_f64(v))
        .collect();
    println!("u_inf: {}", u_inf.join(" "));

    if let Some(trace_path) = &args.trace {
        let trace = outcome.trace.as_ref().expect("recorded when --trace given");
        let mut csv = String::from("k,step_norm,residual_norm\n");
        for row in &trace.rows {
            csv.push_str(&format!(
                "{},{},{}\n",
                row.k,
                fmt_f64(row.step_norm),
                fmt_f64(row.residual_norm)
            ));
        }
        std::fs::write(trace_path, csv)
            .map_err(|e| CliError::parse(format!("{}: {e}", trace_path.display())))?;
        println!(
            "trace: wrote {} rows to {}",
            trace.rows.len(),
            trace_path.display()
        );
    }

    if args.solution_set {
        let set = problem
            .solution_set(&gain)
            .map_err(|e| CliError::gain(e.to_string()))?;
        let particular: Vec<String> = set
            .particular
            .entries()
            .iter()
            .map(|&v| fmt_f64(v))
            .collect();
        println!("particular: {}", particular.join(" "));
        println!("nullspace basis: {} vectors", set.null_basis.len());
        for (i, b) in set.null_basis.iter().enumerate() {
            let vals: Vec<String> = b.entries().iter().map(|&v| fmt_f64(v)).collect();
            println!("basis[{i}]: {}", vals.join(" "));
        }
    }

    if args.verify {
        verify_against_oracle(&problem, &outcome.u_inf, family, config.u0.is_none())?;
    }

    if !outcome.converged {
        return Err(CliError::no_convergence(format!(
            "no convergence after {} iterations (final step norm {})",
            outcome.iterations,
            fmt_f64(outcome.final_step_norm)
        )));
    }
    Ok(())
}

/// Oracle cross-check. From a zero start with a sigma or deadbeat gain the
/// limit is the minimum-norm least-squares solution, so solutions are
/// compared directly; otherwise the limit is only residual-optimal and the
/// residual norms are compared.
fn verify_against_oracle(
    problem: &LaeProblem,
    u_inf: &Vector,
    family: GainFamily,
    zero_start: bool,
) -> Result<(), CliError> {
    let reference = oracle::min_norm_least_squares(problem.g(), problem.y_d())
        .map_err(|e| CliError::verify(format!("oracle failed: {e}")))?;
    let min_norm_expected = zero_start && family != GainFamily::Custom;
    if min_norm_expected {
        let gap = u_inf
            .sub(&reference.solution)
            .map_err(|e| CliError::verify(e.to_string()))?;
        let rel = gap.norm2() / reference.solution.norm2().max(1.0);
        println!("verify: solution vs oracle, relative gap {}", fmt_f64(rel));
        if rel > 1e-5 {
            return Err(CliError::verify(format!(
                "solution differs from oracle by {} relative (tolerance 1e-5); \
                 tighten --epsilon if the run stopped early",
                fmt_f64(rel)
            )));
        }
    } else {
        let residual = problem
            .y_d()
            .sub(
                &problem
                    .g()
                    .matvec(u_inf)
                    .map_err(|e| CliError::verify(e.to_string()))?,
            )
            .map_err(|e| CliError::verify(e.to_string()))?
            .norm2();
        let rel = (residual - reference.residual).abs() / reference.residual.max(1.0);
        println!("verify: residual vs oracle, relative gap {}", fmt_f64(rel));
        if rel > 1e-5 {
            return Err(CliError::verify(format!(
                "residual {} vs oracle {} differs by more than 1e-5 relative",
                fmt_f64(residual),
                fmt_f64(reference.residual)
            )));
        }
    }
    Ok(())
}
