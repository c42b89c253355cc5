use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use logsing::cli::{run, split_pair, Command, Format, Input, RunConfig};
use logsing::fuchsian::ResonancePolicy;

#[derive(Parser)]
#[command(name = "logsing", version, about = "Logarithmic singular series solutions of nonlinear PDEs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Characteristic exponent, maximizing set and assumption checks
    Analyze(Common),
    /// Leading coefficient and formal series solution
    Solve(Common),
    /// Solve, then re-check the residual independently
    Verify(Common),
    /// Majorant constants, growth table and radius estimate
    Majorant(Common),
    /// List the built-in examples
    Examples(Output),
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "human")]
    format: Fmt,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// Equation file (DSL); use --equation or --example instead for inline input
    file: Option<PathBuf>,
    #[arg(long, short = 'e')]
    equation: Option<String>,
    #[arg(long, short = 'x')]
    example: Option<String>,
    #[arg(long = "order", short = 'K', default_value_t = 12)]
    order: u32,
    #[arg(long)]
    max_deg: Option<u32>,
    #[arg(long, default_value_t = 0)]
    root_index: usize,
    /// b(x), a polynomial in x1..xn
    #[arg(long, default_value = "0")]
    b: String,
    #[arg(long, value_enum, default_value = "error")]
    resonance: Policy,
    /// Prescribed leading term RHO=COEFF (switches to prescribed mode)
    #[arg(long, allow_hyphen_values = true)]
    lead: Option<String>,
    /// Data at a resonant exponent, RHO=POLY (repeatable)
    #[arg(long = "data", allow_hyphen_values = true)]
    data: Vec<String>,
    /// Outer radius R for the majorant
    #[arg(long = "radius", default_value = "1")]
    big_r: String,
    /// Inner radius r for the majorant
    #[arg(long = "inner", default_value = "1/2")]
    r: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Human,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Error,
    Frobenius,
}

fn format(f: Fmt) -> Format {
    match f {
        Fmt::Human => Format::Human,
        Fmt::Structured => Format::Structured,
    }
}

fn config(command: Command, c: Common) -> Result<RunConfig, String> {
    let input = match (c.file, c.equation, c.example) {
        (Some(p), None, None) => Input::File(p),
        (None, Some(e), None) => Input::Inline(e),
        (None, None, Some(x)) => Input::Example(x),
        (None, None, None) => return Err("give an equation file, --equation or --example".into()),
        _ => return Err("give only one of: file, --equation, --example".into()),
    };
    let lead = match c.lead {
        Some(s) => Some(split_pair(&s).ok_or_else(|| format!("--lead expects RHO=COEFF, got {s}"))?),
        None => None,
    };
    let data = c
        .data
        .iter()
        .map(|s| split_pair(s).ok_or_else(|| format!("--data expects RHO=POLY, got {s}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RunConfig {
        command,
        input,
        order: c.order,
        max_deg: c.max_deg,
        root_index: c.root_index,
        b: c.b,
        policy: match c.resonance {
            Policy::Error => ResonancePolicy::Error,
            Policy::Frobenius => ResonancePolicy::Frobenius,
        },
        format: format(c.output.format),
        out: c.output.out,
        lead,
        data,
        big_r: c.big_r,
        r: c.r,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.command {
        Cmd::Analyze(c) => config(Command::Analyze, c),
        Cmd::Solve(c) => config(Command::Solve, c),
        Cmd::Verify(c) => config(Command::Verify, c),
        Cmd::Majorant(c) => config(Command::Majorant, c),
        Cmd::Examples(o) => Ok(RunConfig { command: Command::Examples, format: format(o.format), out: o.out, ..RunConfig::default() }),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = run(&cfg);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{}", outcome.text),
    }
    ExitCode::from(outcome.code as u8)
}
