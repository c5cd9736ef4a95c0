use crate::textio::{self, fmt_f64, matrix_rows};
use crate::{parse_positive_f64, parse_positive_usize, CliError, Flags};
use lae::ilc::{ptype_gain, IlcError, LtiPlant};
use lae::lalg::{full_rank_factorization, Matrix, Vector, DEFAULT_TOL};
use lae::solver::validate_gain_matrix;
use std::path::{Path, PathBuf};

struct Args {
    plant: PathBuf,
    reference: PathBuf,
    gain_raw: String,
    u0: Option<PathBuf>,
    iters: usize,
    trace: Option<PathBuf>,
}

fn parse_args(raw: &[String]) -> Result<Args, CliError> {
    let mut plant = None;
    let mut reference = None;
    let mut gain = "sigma".to_string();
    let mut u0 = None;
    let mut iters = 50;
    let mut trace = None;

    let mut flags = Flags::new(raw);
    while let Some(flag) = flags.next_flag() {
        match flag {
            "--plant" => plant = Some(PathBuf::from(flags.value(flag)?)),
            "--reference" => reference = Some(PathBuf::from(flags.value(flag)?)),
            "--gain" => gain = flags.value(flag)?.to_string(),
            "--u0" => {
                let value = flags.value(flag)?;
                u0 = (value != "zero").then(|| PathBuf::from(value));
            }
            "--iters" => iters = parse_positive_usize(flag, flags.value(flag)?)?,
            "--trace" => trace = Some(PathBuf::from(flags.value(flag)?)),
            other => return Err(CliError::parse(format!("unknown flag '{other}'"))),
        }
    }
    Ok(Args {
        plant: plant.ok_or_else(|| CliError::parse("--plant is required"))?,
        reference: reference.ok_or_else(|| CliError::parse("--reference is required"))?,
        gain_raw: gain,
        u0,
        iters,
        trace,
    })
}

/// Plant file: blocks A, B, C, x0 and optionally W ((N+r−1)×n_s, row t =
/// w(t)ᵀ) and V (N×n_o, row i = v(r+i)ᵀ). The horizon is the reference
/// row count.
fn load_plant(path: &Path, horizon: usize) -> Result<LtiPlant, CliError> {
    let blocks = textio::read_blocks(path).map_err(|e| CliError::parse(e.to_string()))?;
    if blocks.len() != 4 && blocks.len() != 6 {
        return Err(CliError::parse(format!(
            "{}: expected blocks A, B, C, x0 [, W, V], found {} blocks",
            path.display(),
            blocks.len()
        )));
    }
    let a = blocks[0].clone();
    let b = blocks[1].clone();
    let c = blocks[2].clone();
    let x0 = textio::column_vector(path, &blocks[3]).map_err(|e| CliError::parse(e.to_string()))?;
    let plant = LtiPlant::new(a, b, c, x0, horizon)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    if blocks.len() == 6 {
        let w = matrix_rows(&blocks[4]);
        let v = matrix_rows(&blocks[5]);
        Ok(plant.with_disturbances(w, v))
    } else {
        Ok(plant)
    }
}

pub fn run(raw: &[String]) -> Result<(), CliError> {
    let args = parse_args(raw)?;
    let reference_block =
        textio::read_matrix(&args.reference).map_err(|e| CliError::parse(e.to_string()))?;
    let y_d = matrix_rows(&reference_block);
    let plant = load_plant(&args.plant, y_d.len())?;

    let r = plant.relative_degree().map_err(|e| match e {
        IlcError::ZeroTransfer => CliError::gain(e.to_string()),
        other => CliError::parse(other.to_string()),
    })?;
    let lifted = plant
        .lift(&y_d)
        .map_err(|e| CliError::parse(e.to_string()))?;
    println!("relative degree: {r}");
    println!(
        "lifted: {}x{} (horizon {}, inputs {}, outputs {})",
        lifted.g.rows(),
        lifted.g.cols(),
        plant.horizon(),
        plant.input_dim(),
        plant.output_dim()
    );

    let f = parse_gain(&args.gain_raw, &plant, &lifted.g)?;

    // certificate of the gain on the lifted map
    match full_rank_factorization(&lifted.g, DEFAULT_TOL)
        .map_err(|e| e.into())
        .and_then(|fact| validate_gain_matrix(&lifted.g, &fact, f.clone(), DEFAULT_TOL))
    {
        Ok(gain) => println!(
            "gain: {} property-p={} certificate={}",
            args.gain_raw,
            gain.property_p(),
            gain.certificate()
        ),
        Err(e) => println!("gain: {} (not validated: {e})", args.gain_raw),
    }
    if lifted.y_tilde_d.max_abs() == 0.0 {
        println!("note: the reference is already met by the zero input");
    }

    let u0: Vec<Vector> = match &args.u0 {
        Some(path) => {
            let block = textio::read_matrix(path).map_err(|e| CliError::parse(e.to_string()))?;
            if block.rows() != plant.horizon() || block.cols() != plant.input_dim() {
                return Err(CliError::parse(format!(
                    "{}: initial input must be {}x{}, got {}x{}",
                    path.display(),
                    plant.horizon(),
                    plant.input_dim(),
                    block.rows(),
                    block.cols()
                )));
            }
            matrix_rows(&block)
        }
        None => (0..plant.horizon())
            .map(|_| Vector::zeros(plant.input_dim()))
            .collect(),
    };

    let run = plant
        .run_ilc(&y_d, &f, &u0, args.iters)
        .map_err(|e| match e {
            IlcError::NonFinite { .. } => CliError::no_convergence(e.to_string()),
            other => CliError::parse(other.to_string()),
        })?;

    println!("iterations: {}", run.iterations);
    println!(
        "tracking error: start {} final {}",
        fmt_f64(run.tracking_errors[0]),
        fmt_f64(*run.tracking_errors.last().unwrap())
    );

    if let Some(trace_path) = &args.trace {
        let mut csv = String::from("k,tracking_error\n");
        for (k, e) in run.tracking_errors.iter().enumerate() {
            csv.push_str(&format!("{k},{}\n", fmt_f64(*e)));
        }
        std::fs::write(trace_path, csv)
            .map_err(|e| CliError::parse(format!("{}: {e}", trace_path.display())))?;
        println!(
            "trace: wrote {} rows to {}",
            run.tracking_errors.len(),
            trace_path.display()
        );
    }
    Ok(())
}

fn parse_gain(raw: &str, plant: &LtiPlant, lifted_g: &Matrix) -> Result<Matrix, CliError> {
    if let Some(path) = raw.strip_prefix("f0:") {
        let f0 =
            textio::read_matrix(Path::new(path)).map_err(|e| CliError::parse(e.to_string()))?;
        if f0.rows() != plant.input_dim() || f0.cols() != plant.output_dim() {
            return Err(CliError::parse(format!(
                "{path}: per-step gain must be {}x{}, got {}x{}",
                plant.input_dim(),
                plant.output_dim(),
                f0.rows(),
                f0.cols()
            )));
        }
        return Ok(ptype_gain(&f0, plant.horizon()));
    }
    if let Some(path) = raw.strip_prefix("full:") {
        let f = textio::read_matrix(Path::new(path)).map_err(|e| CliError::parse(e.to_string()))?;
        return Ok(f);
    }
    let sigma = if raw == "sigma" {
        1.0 / lifted_g.gram_trace()
    } else if let Some(value) = raw.strip_prefix("sigma:") {
        parse_positive_f64("--gain sigma", value)?
    } else {
        return Err(CliError::parse(format!(
            "--gain: expected f0:<file>, full:<file>, or sigma[:V], got '{raw}'"
        )));
    };
    lifted_g
        .transpose()
        .scale(sigma)
        .map_err(|e| CliError::parse(e.to_string()))
}
