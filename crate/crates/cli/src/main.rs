use std::path::PathBuf;
use std::process::ExitCode;

use abelsurf::invariants::CountMode;
use abelsurf_cli::commands::{cmd_classify, cmd_endoring, cmd_split, Options};
use abelsurf_cli::corpus::{parse_corpus, run_corpus, Outcome};
use abelsurf_cli::report::Report;
use abelsurf_cli::spec::CurveSpec;
use abelsurf_cli::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "abelsurf",
    version,
    about = "Invariants, endomorphism rings and elliptic factors of genus-2 Jacobians"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Frobenius polynomial, p-rank, simplicity and automorphisms.
    Classify(CurveArgs),
    /// Endomorphism ring of a simple ordinary or p-rank-1 Jacobian.
    Endoring {
        #[command(flatten)]
        curve: CurveArgs,
        /// Largest prime used for torsion computations.
        #[arg(long)]
        max_ell: Option<u64>,
        /// Largest torsion field size in bits.
        #[arg(long)]
        max_field_bits: Option<u64>,
    },
    /// Richelot splittings, elliptic subcovers and explicit splittings.
    Split {
        #[command(flatten)]
        curve: CurveArgs,
        /// Largest degree of the subcover search.
        #[arg(long, default_value_t = 1)]
        dmax: usize,
        /// Split f into two elliptic curves from a root ordering when f splits over the base field.
        #[arg(long)]
        try_iezzi: bool,
    },
    /// Classify every curve of a corpus file and diff against stored reports.
    Corpus {
        path: PathBuf,
        #[arg(long)]
        update: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    Naive,
    HasseWitt,
}

#[derive(Args)]
struct CurveArgs {
    /// Characteristic.
    #[arg(long)]
    p: u64,
    /// Degree of the base field over F_p.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Monic modulus of F_{p^n}, low coefficient first.
    #[arg(long)]
    modulus: Option<String>,
    /// Coefficients of f from x⁰ to x⁶; an F_{p^n} coefficient is written c0:c1:….
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write the report to this file.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    count: Mode,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

impl CurveArgs {
    fn spec(&self) -> Result<CurveSpec, CliError> {
        CurveSpec::parse(self.p, self.n, self.modulus.as_deref(), &self.f)
    }

    fn options(&self) -> Options {
        let mode = match self.count {
            Mode::Auto => CountMode::Auto,
            Mode::Naive => CountMode::Naive,
            Mode::HasseWitt => CountMode::HasseWitt,
        };
        Options { seed: self.seed, mode, timing: self.timing, ..Options::default() }
    }
}

fn emit(r: &Report, json: Option<&PathBuf>) -> Result<ExitCode, CliError> {
    let s = r.to_json();
    println!("{s}");
    if let Some(path) = json {
        std::fs::write(path, s + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(ExitCode::from(if r.is_undetermined() { 3 } else { 0 }))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.cmd {
        Cmd::Classify(a) => emit(&cmd_classify(&a.spec()?, &a.options())?, a.json.as_ref()),
        Cmd::Endoring { curve, max_ell, max_field_bits } => {
            let mut o = curve.options();
            if let Some(m) = max_ell {
                o.limits.max_ell = m;
            }
            if let Some(b) = max_field_bits {
                o.limits.max_field_bits = b;
            }
            emit(&cmd_endoring(&curve.spec()?, &o)?, curve.json.as_ref())
        }
        Cmd::Split { curve, dmax, try_iezzi } => {
            let o = Options { d_max: dmax, try_iezzi, ..curve.options() };
            emit(&cmd_split(&curve.spec()?, &o)?, curve.json.as_ref())
        }
        Cmd::Corpus { path, update, seed } => {
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let dir = path.parent().map(|p| p.to_path_buf()).unwrap_or_default();
            let entries = parse_corpus(&text, &dir)?;
            let opts = Options { seed, ..Options::default() };
            let mut bad = false;
            for (line, outcome) in run_corpus(&entries, &opts, update) {
                match outcome {
                    Outcome::Match => println!("line {line}: match"),
                    Outcome::Unchecked => println!("line {line}: no expected report"),
                    Outcome::Differs(d) => {
                        bad = true;
                        println!("line {line}: differs, {d}");
                    }
                    Outcome::Failed(e) => {
                        bad = true;
                        println!("line {line}: failed, {e}");
                    }
                }
            }
            Ok(ExitCode::from(if bad { 4 } else { 0 }))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
