//! `lae` — solve linear algebraic equations by observer-style iteration,
//! run lifted-plant tracking experiments, and benchmark gain families.

mod bench_cmd;
mod ilc_cmd;
mod solve_cmd;
mod textio;

use std::process::ExitCode;

/// CLI failure paired with its exit code.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    pub fn gain(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn no_convergence(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }

    pub fn verify(message: impl Into<String>) -> Self {
        CliError {
            code: 4,
            message: message.into(),
        }
    }
}

const USAGE: &str = "\
usage: lae <command> [flags]

commands:
  solve   --problem <file> [--gain sigma[:V]|deadbeat[:zero|shift]|custom:<file>]
          [--epsilon E] [--residual-epsilon E] [--u0 <file|zero>] [--max-iters N]
          [--trace <out.csv>] [--verify] [--solution-set]
  ilc     --plant <file> --reference <file> [--gain f0:<file>|full:<file>|sigma[:V]]
          [--u0 <file|zero>] [--iters N] [--trace <out.csv>]
  bench   --sizes PxQ[,PxQ...] [--rank-class full-col|full-row|deficient]
          [--seed N] [--count N] [--out <csv>] [--timings]

file format: blocks of 'rows cols' headers followed by whitespace-separated
rows; vectors are single-column blocks; '#' comments allowed.

exit codes: 0 ok, 1 parse/usage, 2 gain validation, 3 no convergence or
divergence, 4 verification mismatch.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        eprint!("{USAGE}");
        return ExitCode::from(1);
    };
    let rest = &args[1..];
    let result = match command.as_str() {
        "solve" => solve_cmd::run(rest),
        "ilc" => ilc_cmd::run(rest),
        "bench" => bench_cmd::run(rest),
        "--help" | "-h" | "help" => {
            print!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        other => Err(CliError::parse(format!("unknown command '{other}'"))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

/// Shared flag-walker: `--name value` pairs plus bare switches.
pub struct Flags<'a> {
    args: &'a [String],
    index: usize,
}

impl<'a> Flags<'a> {
    pub fn new(args: &'a [String]) -> Self {
        Flags { args, index: 0 }
    }

    pub fn next_flag(&mut self) -> Option<&'a str> {
        let flag = self.args.get(self.index)?;
        self.index += 1;
        Some(flag.as_str())
    }

    pub fn value(&mut self, flag: &str) -> Result<&'a str, CliError> {
        let value = self
            .args
            .get(self.index)
            .ok_or_else(|| CliError::parse(format!("{flag} requires a value")))?;
        self.index += 1;
        Ok(value.as_str())
    }
}

pub fn parse_positive_f64(flag: &str, raw: &str) -> Result<f64, CliError> {
    let value: f64 = raw
        .parse()
        .map_err(|_| CliError::parse(format!("{flag}: '{raw}' is not a number")))?;
    if !(value > 0.0 && value.is_finite()) {
        return Err(CliError::parse(format!(
            "{flag}: must be a positive number"
        )));
    }
    Ok(value)
}

pub fn parse_positive_usize(flag: &str, raw: &str) -> Result<usize, CliError> {
    let value: usize = raw
        .parse()
        .map_err(|_| CliError::parse(format!("{flag}: '{raw}' is not a positive integer")))?;
    if value == 0 {
        return Err(CliError::parse(format!("{flag}: must be positive")));
    }
    Ok(value)
}
