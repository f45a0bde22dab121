use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use algotrace::cli::{self, CliError, Input, Limits, Outcome, RunSpec};
use algotrace::kernel::{Language, DEFAULT_MAX_SEQUENCES, DEFAULT_MAX_STEPS};

#[derive(Parser)]
#[command(name = "algotrace", version, about = "Reduction sequences, execution traces and algorithm identity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProgramArgs {
    /// imp, eqn or lam; defaults to the program's file extension
    #[arg(long)]
    lang: Option<Language>,
    #[arg(long)]
    program: PathBuf,
    /// Function applied to the inputs (eqn only; default `f`)
    #[arg(long)]
    entry: Option<String>,
    /// Variables kept by the projection, in order (imp only; default all)
    #[arg(long, value_delimiter = ',')]
    keep: Vec<String>,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
    #[arg(long = "max-seqs", default_value_t = DEFAULT_MAX_SEQUENCES)]
    max_seqs: usize,
}

impl From<&LimitArgs> for Limits {
    fn from(l: &LimitArgs) -> Self {
        Limits { max_steps: l.max_steps, max_sequences: l.max_seqs }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the reduction sequence of one run
    Run {
        #[command(flatten)]
        program: ProgramArgs,
        /// `x=12,y=1` for imp, `12` for eqn/lam
        #[arg(long, default_value = "")]
        input: String,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Write the trace set of a program over a finite set of inputs
    Enumerate {
        #[command(flatten)]
        program: ProgramArgs,
        /// `x=1..20`, `x=7,8,12`, `true,false`; `;` separates dimensions
        #[arg(long)]
        inputs: String,
        /// Collapse runs of equal consecutive states
        #[arg(long)]
        dedup: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Is FAST a speed-up of SLOW? Prints `k=<n>` or `not-a-speedup`
    Speedup { fast: PathBuf, slow: PathBuf },
    /// Compare two trace-set files
    Equal { a: PathBuf, b: PathBuf },
    /// Build and compare the trace sets of two programs over shared inputs
    Compare {
        #[command(flatten)]
        a: ProgramArgs,
        #[arg(long = "lang-b")]
        lang_b: Option<Language>,
        #[arg(long = "program-b")]
        program_b: PathBuf,
        #[arg(long = "entry-b")]
        entry_b: Option<String>,
        #[arg(long = "keep-b", value_delimiter = ',')]
        keep_b: Vec<String>,
        #[arg(long)]
        inputs: String,
        #[arg(long)]
        dedup: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
}

fn spec(
    lang: Option<Language>,
    program: &Path,
    entry: Option<String>,
    keep: &[String],
    dedup: bool,
    limits: &LimitArgs,
) -> Result<RunSpec, CliError> {
    let mut spec = RunSpec::from_file(program, lang)?;
    if !keep.is_empty() {
        spec = spec.with_keep(keep)?;
    }
    spec.entry = entry;
    spec.dedup = dedup;
    spec.limits = limits.into();
    Ok(spec)
}

fn dispatch(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Run { program: p, input, limits } => {
            let spec = spec(p.lang, &p.program, p.entry, &p.keep, false, &limits)?;
            let input: Input = cli::parse_input(&input)?;
            cli::cmd_run(&spec, &input)
        }
        Command::Enumerate { program: p, inputs, dedup, out, limits } => {
            let spec = spec(p.lang, &p.program, p.entry, &p.keep, dedup, &limits)?;
            cli::cmd_enumerate(&spec, &inputs, out.as_deref())
        }
        Command::Speedup { fast, slow } => cli::cmd_speedup(&fast, &slow),
        Command::Equal { a, b } => cli::cmd_equal(&a, &b),
        Command::Compare { a, lang_b, program_b, entry_b, keep_b, inputs, dedup, limits } => {
            let sa = spec(a.lang, &a.program, a.entry, &a.keep, dedup, &limits)?;
            let sb = spec(lang_b, &program_b, entry_b, &keep_b, dedup, &limits)?;
            cli::cmd_compare(&sa, &sb, &inputs)
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match dispatch(args.command) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            let _ = std::io::stdout().flush();
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
