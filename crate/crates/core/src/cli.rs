//! The `lucas` command-line tool.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use crate::criteria::{self, CriterionId};
use crate::error::Error;
use crate::lucas::{self, LucasParams, Method};
use crate::periods;
use crate::report::{
    decimal_digits, BenchRow, ClassifyRecord, ComputeRecord, ModRecord, PeriodRecord, Render,
};
use crate::verify::{self, GridSpec, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURES: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "lucas",
    version,
    about = "Lucas sequences U_n(P,Q): exact values, periods mod m, and mod-4 non-square criteria"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads for grid sweeps (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,

    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Rec,
    Closed,
    Matrix,
}

impl MethodArg {
    fn method(self) -> Method {
        match self {
            MethodArg::Rec => Method::Recurrence,
            MethodArg::Closed => Method::ClosedForm,
            MethodArg::Matrix => Method::Matrix,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MethodArg::Rec => "rec",
            MethodArg::Closed => "closed",
            MethodArg::Matrix => "matrix",
        }
    }
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    p: BigInt,
    #[arg(long, allow_negative_numbers = true)]
    q: BigInt,
}

impl ParamArgs {
    fn params(&self) -> LucasParams {
        LucasParams::new(self.p.clone(), self.q.clone())
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact U_n in decimal.
    Compute {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        n: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Matrix)]
        method: MethodArg,
        /// Print only the number of decimal digits.
        #[arg(long)]
        digits_only: bool,
    },
    /// U_n mod m.
    Mod {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        n: u64,
        #[arg(long, allow_negative_numbers = true)]
        modulus: u64,
    },
    /// Preperiod, period and residue cycle of U_n mod m.
    Period {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        modulus: u64,
    },
    /// Which mod-4 criteria rule out U_n being a nonzero square.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        n: u64,
    },
    /// Sweep criteria over P in [-p-bound, p-bound], Q in [-q-bound, q-bound], n in [0, n-max].
    Verify {
        /// T31A, T31B, T32, T33, T34 or ALL.
        #[arg(long, default_value = "ALL")]
        criterion: String,
        #[arg(long)]
        p_bound: u32,
        #[arg(long)]
        q_bound: u32,
        #[arg(long, allow_negative_numbers = true)]
        n_max: u64,
        /// Largest n checked with exact big integers (mod 4 only above it).
        #[arg(long, allow_negative_numbers = true)]
        direct_limit: u64,
    },
    /// Check that the recurrence, closed form and matrix evaluators agree.
    Equiv {
        #[arg(long)]
        p_bound: u32,
        #[arg(long)]
        q_bound: u32,
        #[arg(long, allow_negative_numbers = true)]
        n_max: u64,
    },
    /// Zero and nonzero-square indices of U_0..U_{n-max}.
    Census {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        n_max: u64,
    },
    /// Square indices of odd coprime (P, Q), P^2 - 4Q > 0, must lie in {1, 2, 3, 6, 12}.
    RmCheck {
        #[arg(long)]
        p_max: u32,
        #[arg(long)]
        q_bound: u32,
        #[arg(long, allow_negative_numbers = true)]
        n_max: u64,
    },
    /// Random odd (P, Q) against the hand-worked mod-4 values for n = 3..17.
    Examples {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Timing table for the evaluators.
    Bench,
}

enum Outcome {
    Record(Box<dyn Render + Send>),
    Reports(Vec<VerificationReport>),
    Bench(Vec<BenchRow>),
}

impl Outcome {
    fn renderable(&self) -> &dyn Render {
        match self {
            Outcome::Record(r) => r.as_ref(),
            Outcome::Reports(r) => r,
            Outcome::Bench(r) => r,
        }
    }

    fn has_failures(&self) -> bool {
        matches!(self, Outcome::Reports(r) if r.iter().any(|r| !r.passed()))
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };

    match execute(&cli) {
        Ok(outcome) => match emit(&cli, &outcome, out) {
            Ok(()) if outcome.has_failures() => EXIT_FAILURES,
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    // Without --jobs the lazily started global pool is used, so single-value
    // subcommands never spawn threads.
    let Some(jobs) = cli.jobs else {
        return dispatch(cli);
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs as usize)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let outcome = match &cli.command {
        Command::Compute {
            params,
            n,
            method,
            digits_only,
        } => {
            let value = method.method().evaluate(&params.params(), *n)?;
            Outcome::Record(Box::new(ComputeRecord {
                params: params.params(),
                n: *n,
                method: method.name().to_string(),
                digits: decimal_digits(&value),
                value: (!digits_only).then_some(value),
            }))
        }
        Command::Mod { params, n, modulus } => {
            let r = lucas::u_mod(&params.params(), *n, *modulus)?;
            Outcome::Record(Box::new(ModRecord {
                params: params.params(),
                n: *n,
                modulus: *modulus,
                residue: r.value(),
            }))
        }
        Command::Period { params, modulus } => {
            let info = periods::period_mod(&params.params(), *modulus)?;
            Outcome::Record(Box::new(PeriodRecord {
                params: params.params(),
                info,
            }))
        }
        Command::Classify { params, n } => {
            let verdict = criteria::classify(&params.params(), *n);
            Outcome::Record(Box::new(ClassifyRecord::new(params.params(), *n, &verdict)))
        }
        Command::Verify {
            criterion,
            p_bound,
            q_bound,
            n_max,
            direct_limit,
        } => {
            let selected: Vec<CriterionId> = if criterion.eq_ignore_ascii_case("ALL") {
                CriterionId::ALL.to_vec()
            } else {
                vec![criterion.parse().map_err(CliError::Usage)?]
            };
            let grid = GridSpec::symmetric(*p_bound, *q_bound, *n_max, *direct_limit)?;
            Outcome::Reports(verify::verify_criteria(&selected, &grid))
        }
        Command::Equiv {
            p_bound,
            q_bound,
            n_max,
        } => Outcome::Reports(vec![verify::check_equivalence(*p_bound, *q_bound, *n_max)]),
        Command::Census { params, n_max } => {
            Outcome::Record(Box::new(verify::census(&params.params(), *n_max)))
        }
        Command::RmCheck {
            p_max,
            q_bound,
            n_max,
        } => Outcome::Reports(vec![verify::check_rm_subset(*p_max, *q_bound, *n_max)]),
        Command::Examples { samples } => {
            Outcome::Reports(vec![verify::check_worked_examples(*samples, cli.seed)])
        }
        Command::Bench => Outcome::Bench(bench()),
    };
    Ok(outcome)
}

fn bench() -> Vec<BenchRow> {
    let fib = LucasParams::new(1, -1);
    let mut rows = Vec::new();
    let mut time = |name: &str, n: u64, f: &dyn Fn() -> BigInt| {
        let start = Instant::now();
        let v = f();
        rows.push(BenchRow {
            evaluator: name.to_string(),
            n,
            digits: decimal_digits(&v),
            micros: start.elapsed().as_micros(),
        });
    };
    for n in [1_000, 10_000] {
        time("rec", n, &|| lucas::u_rec(&fib, n));
        time("closed", n, &|| lucas::u_closed(&fib, n).expect("n >= 1"));
        time("matrix", n, &|| lucas::u_matrix(&fib, n));
    }
    time("matrix", 100_000, &|| lucas::u_matrix(&fib, 100_000));
    time("matrix", 1_000_000, &|| lucas::u_matrix(&fib, 1_000_000));
    for n in [1_000_000_000_000u64, u64::MAX] {
        time("mod4", n, &|| {
            BigInt::from(lucas::u_mod(&fib, n, 4).expect("modulus 4").value())
        });
    }
    rows
}

fn emit(cli: &Cli, outcome: &Outcome, stdout: &mut dyn Write) -> Result<(), CliError> {
    let body = render(cli.format, outcome.renderable())?;
    match &cli.out {
        Some(path) => {
            let mut f = File::create(path)?;
            f.write_all(body.as_bytes())?;
        }
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn render(format: Format, r: &dyn Render) -> Result<String, CliError> {
    Ok(match format {
        Format::Text => r.text(),
        Format::Jsonl => {
            let mut s = String::new();
            for line in r.json_lines() {
                s.push_str(&line);
                s.push('\n');
            }
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io_err = |e: csv::Error| CliError::Io(io::Error::other(e));
            w.write_record(r.csv_header()).map_err(io_err)?;
            for row in r.csv_rows() {
                w.write_record(&row).map_err(io_err)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{Check, SquareViolation};

    #[test]
    fn failing_report_sets_failure_outcome() {
        let mut report = verify::check_rm_subset(1, 1, 20);
        assert!(!Outcome::Reports(vec![report.clone()]).has_failures());
        report.square_violations.push(SquareViolation {
            p: 1,
            q: -1,
            n: 4,
            value: 9.into(),
        });
        assert_eq!(report.check, Check::RmSubset);
        assert!(Outcome::Reports(vec![report]).has_failures());
    }
}
