//! `hmcreal`: certified computations from the command line.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Outcome;

#[derive(Parser)]
#[command(name = "hmcreal", version, about = "Certified real-number computations with exact reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
pub struct Output {
    /// Emit a JSON report instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decimal digits of e with a certified error marker.
    Edigits {
        #[arg(long, default_value_t = 10)]
        precision: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Table of the integrals of a^k e^-a against k!.
    Euler {
        #[arg(long, default_value_t = 6)]
        k_max: u64,
        #[arg(long, value_enum, default_value_t = Mode::Newton)]
        mode: Mode,
        /// Tolerance, written 1/k.
        #[arg(long, default_value = "1/100")]
        tol: String,
        #[command(flatten)]
        out: Output,
    },
    /// Refute `a0 + a1 e + ... + an e^n = 0` with Hilbert's quantities A(m), B(m).
    Hilbert {
        /// Coefficients a0,...,an.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long, default_value_t = 8)]
        m_max: usize,
        #[arg(long, value_enum, default_value_t = RouteArg::Newton)]
        route: RouteArg,
        #[command(flatten)]
        out: Output,
    },
    /// Liouville's inequality at rational samples.
    Liouville {
        /// Integer coefficients, highest degree first.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        /// `convergents:N` or a comma-separated list of fractions.
        #[arg(long, default_value = "convergents:8")]
        samples: String,
        #[command(flatten)]
        out: Output,
    },
    /// Witness that Liouville's number is not algebraic of a given degree.
    Lambda {
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value = "1/10")]
        y: String,
        #[command(flatten)]
        out: Output,
    },
    /// Coefficients of a formal power series, optionally quasi-shifted.
    Fps {
        /// `exp` or `poly:c0,c1,...` (lowest degree first).
        #[arg(long, default_value = "exp")]
        series: String,
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<String>,
        #[arg(long, default_value_t = 10)]
        terms: usize,
        #[arg(long, default_value_t = 12)]
        digits: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Stage of the north-east function construction.
    Northeast {
        #[arg(long)]
        stage: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Mode {
    Riemann,
    Newton,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum RouteArg {
    Newton,
    Riemann,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Edigits { precision, out } => commands::edigits(precision, out),
        Command::Euler { k_max, mode, tol, out } => commands::euler(k_max, mode, &tol, out),
        Command::Hilbert { coeffs, m_max, route, out } => commands::hilbert(&coeffs, m_max, route, out),
        Command::Liouville { poly, samples, out } => commands::liouville(&poly, &samples, out),
        Command::Lambda { degree, y, out } => commands::lambda(degree, &y, out),
        Command::Fps { series, shift, terms, digits, out } => {
            commands::fps(&series, shift.as_deref(), terms, digits, out)
        }
        Command::Northeast { stage, out } => commands::northeast(stage, out),
    };
    match result {
        Ok(Outcome { stdout, code }) => {
            print!("{stdout}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("hmcreal: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
