use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "egrq",
    version,
    about = "Elliptic curves with everywhere good reduction and rational j over quadratic fields"
)]
struct Cli {
    /// Scan bound on |A| for good D.
    #[arg(long, global = true, default_value = "10000", value_parser = parse_positive)]
    a_max: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List good D with a witnessing A, |A| <= a-max.
    GoodD,
    /// Decide whether Q(sqrt(m)) has a curve with everywhere good reduction and rational j.
    Decide {
        #[arg(allow_hyphen_values = true)]
        m: String,
        /// Conic solutions to try before giving up on a witness.
        #[arg(long, default_value = "8", value_parser = parse_positive)]
        retry_cap: u64,
    },
    /// Construct and verify a witness curve over Q(sqrt(m)).
    Construct {
        #[arg(allow_hyphen_values = true)]
        m: String,
        #[arg(long, default_value = "8", value_parser = parse_positive)]
        retry_cap: u64,
    },
    /// Run Tate's algorithm at every prime dividing the discriminant of a curve file.
    Verify { file: PathBuf },
    /// Count a family: an integer D, or R / I for the aggregate real / imaginary counts.
    Count {
        #[arg(allow_hyphen_values = true)]
        family: String,
        /// Upper end of the grid (also accepted as --x-max).
        #[arg(value_parser = parse_positive)]
        x: Option<u64>,
        #[arg(long, value_parser = parse_positive)]
        x_max: Option<u64>,
        /// Emit rows as family,X,count,normalized.
        #[arg(long)]
        long: bool,
    },
}

/// A positive integer, optionally written as `<int>e<exp>`.
fn parse_positive(s: &str) -> Result<u64, String> {
    let v = parse_scientific(s)?;
    if v == 0 {
        return Err("must be positive".into());
    }
    Ok(v)
}

fn parse_scientific(s: &str) -> Result<u64, String> {
    let bad = || format!("not a non-negative integer: {s}");
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<u32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let mant: u64 = mant.parse().map_err(|_| bad())?;
    10u64
        .checked_pow(exp)
        .and_then(|p| mant.checked_mul(p))
        .ok_or_else(|| format!("too large: {s}"))
}

fn run(cli: &Cli) -> Result<(String, ExitCode), Failure> {
    let fmt = cli.format;
    match &cli.command {
        Command::GoodD => commands::good_d(cli.a_max, fmt),
        Command::Decide { m, retry_cap } => {
            commands::decide(commands::parse_m(m)?, cli.a_max, *retry_cap as usize, fmt)
        }
        Command::Construct { m, retry_cap } => {
            commands::construct(commands::parse_m(m)?, cli.a_max, *retry_cap as usize, fmt)
        }
        Command::Verify { file } => commands::verify(file, fmt),
        Command::Count {
            family,
            x,
            x_max,
            long,
        } => {
            let x = match (x, x_max) {
                (Some(a), Some(b)) if a != b => {
                    return Err(Failure::Input(format!(
                        "conflicting bounds {a} and --x-max {b}"
                    )))
                }
                (Some(a), _) => *a,
                (None, Some(b)) => *b,
                (None, None) => 1_000_000,
            };
            commands::count(family, x, cli.a_max, *long, fmt)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let (text, code) = match run(&cli) {
        Ok(v) => v,
        Err(f) => {
            eprintln!("error: {f}");
            return f.code();
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_bounds() {
        assert_eq!(parse_scientific("1e6"), Ok(1_000_000));
        assert_eq!(parse_scientific("25E2"), Ok(2500));
        assert_eq!(parse_scientific("40"), Ok(40));
        assert!(parse_scientific("1.5e3").is_err());
        assert!(parse_scientific("-3").is_err());
        assert!(parse_scientific("1e40").is_err());
        assert!(parse_positive("0").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
