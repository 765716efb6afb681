use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use deriv_audit::report::{classify_point, DEFAULT_GRID, DEFAULT_PLOT_POINTS};
use deriv_audit::{analyze, differentiate, emit_plot_data, parse, AnalyzeOptions, Error, Interval};

#[derive(Parser)]
#[command(
    name = "deriv-audit",
    version,
    about = "Audit a derivative expression against the limit definition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Differentiate, find suspect points, and list horizontal tangents on an interval.
    Analyze {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, required = true)]
        interval: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long)]
        json: bool,
        /// Write `x,f,fprime` samples to this CSV file.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long = "plot-n", default_value_t = DEFAULT_PLOT_POINTS, requires = "plot")]
        plot_n: usize,
    },
    /// Run the three checks at a single point.
    Classify {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_negative_numbers = true)]
        at: f64,
        #[arg(long)]
        json: bool,
    },
    /// Print the derivative expression.
    Diff {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Analyze {
            expr,
            interval,
            grid,
            json,
            plot,
            plot_n,
        } => {
            let iv = Interval::new(interval[0], interval[1])?;
            let report = analyze(&expr, iv, &AnalyzeOptions { grid_n: grid })?;
            if let Some(path) = plot {
                emit_plot_data(&parse(&expr)?, iv, plot_n, &path)?;
            }
            Ok(if json {
                report.to_json()
            } else {
                report.to_text()
            })
        }
        Command::Classify { expr, at, json } => {
            if !at.is_finite() {
                return Err(Error::UndefinedAtPoint { x: at });
            }
            let report = classify_point(&expr, at)?;
            Ok(if json {
                report.to_json()
            } else {
                report.to_text()
            })
        }
        Command::Diff { expr } => Ok(format!("{}\n", differentiate(&parse(&expr)?).simplified)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
