//! `isaw`: command-line front end for instruction sequences, threads and
//! processes.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use isaw_core::bisim::{rooted_branching_bisimilar, strong_bisimilar};
use isaw_core::extract::extract_thread;
use isaw_core::format::{from_aut, from_json, to_aut, to_json};
use isaw_core::lps::{lts_from_linear_spec, parse_linear_process_spec};
use isaw_core::lts::{abstract_labels, tau_prefix, ActionLabel, Lts};
use isaw_core::pga::{canonical_form, parse_pga, InstructionSequence};
use isaw_core::pgld::{parse_pgld, pgld_to_pga};
use isaw_core::process::{pextr_c, use_process_lts};
use isaw_core::service::{parse_attachment, use_thread, AnyService, ServiceError, DEFAULT_STATE_BOUND};
use isaw_core::synth::{synth_binary, synth_multireply, to_single_occurrence};
use isaw_core::thread::{to_linear_spec, ThreadAutomaton};

const STATE_BOUND_VAR: &str = "ISAW_STATE_BOUND";

#[derive(Parser)]
#[command(name = "isaw", version, about = "Instruction sequences, threads and processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Notation {
    Pga,
    Pgld,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Aut,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Multi,
    Binary,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Strong,
    Rbranching,
}

#[derive(clap::Args)]
struct ProgramInput {
    /// Program file (`-` for standard input)
    input: PathBuf,
    /// Program notation; by default `.pgld` files are PGLDmr and anything
    /// else is PGAmr
    #[arg(long, value_enum)]
    notation: Option<Notation>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form of a PGAmr term
    Canon {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Translate a PGLDmr program into PGAmr
    Translate {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Extract the thread of a program as a linear thread specification
    Thread {
        #[command(flatten)]
        program: ProgramInput,
        /// Attach a service, `focus=descriptor`; applied left to right
        #[arg(long = "use", value_name = "FOCUS=SERVICE")]
        uses: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Extract the process of a program (or of a `.lps` specification)
    Process {
        #[command(flatten)]
        program: ProgramInput,
        /// Attach a service, `focus=descriptor`; applied left to right
        #[arg(long = "use", value_name = "FOCUS=SERVICE")]
        uses: Vec<String>,
        /// Labels to abstract in addition to `stop` (comma separated)
        #[arg(long = "abstract", value_name = "LABELS", value_delimiter = ',')]
        hidden: Vec<String>,
        /// Output format; by default taken from the output file extension,
        /// else JSON
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Synthesize a PGLDmr program from a linear process specification
    Synth {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Auxiliary action for binary mode
        #[arg(long, default_value = "tact")]
        tact: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rewrite a block-form PGLDmr program so each instruction occurs once
    SingleOccurrence {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare two LTS files (`.json` or `.aut`)
    Equiv {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Prefix both processes with a tau step first
        #[arg(long)]
        root_tau: bool,
        left: PathBuf,
        right: PathBuf,
    },
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<isaw_core::Error> for Failure {
    fn from(e: isaw_core::Error) -> Self {
        match e {
            isaw_core::Error::Service(s) => s.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<ServiceError> for Failure {
    fn from(e: ServiceError) -> Self {
        let code = match e {
            ServiceError::StateBoundExceeded { .. } => 3,
            ServiceError::BadDescriptor(_) => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn lift<E: Into<isaw_core::Error>>(e: E) -> Failure {
    Failure::from(e.into())
}

fn state_bound() -> Result<usize, Failure> {
    match std::env::var(STATE_BOUND_VAR) {
        Err(_) => Ok(DEFAULT_STATE_BOUND),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Failure::usage(format!("{STATE_BOUND_VAR} must be a positive integer, got `{v}`"))),
        },
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("reading standard input: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn extension(path: &Path) -> Option<&str> {
    path.extension().and_then(|e| e.to_str())
}

fn line(s: impl std::fmt::Display) -> String {
    format!("{s}\n")
}

fn load_sequence(program: &ProgramInput) -> Result<InstructionSequence, Failure> {
    let text = read(&program.input)?;
    let notation = program.notation.unwrap_or(match extension(&program.input) {
        Some("pgld") => Notation::Pgld,
        _ => Notation::Pga,
    });
    Ok(match notation {
        Notation::Pga => canonical_form(&parse_pga(&text).map_err(lift)?),
        Notation::Pgld => pgld_to_pga(&parse_pgld(&text).map_err(lift)?),
    })
}

fn attachments(uses: &[String]) -> Result<Vec<(String, AnyService)>, Failure> {
    let mut seen = HashSet::new();
    uses.iter()
        .map(|u| {
            let (focus, service) = parse_attachment(u)?;
            if !seen.insert(focus.clone()) {
                return Err(Failure::usage(format!("focus `{focus}` is attached twice")));
            }
            Ok((focus, service))
        })
        .collect()
}

fn load_lts(path: &Path) -> Result<Lts, Failure> {
    let text = read(path)?;
    let lts = match extension(path) {
        Some("aut") => from_aut(&text),
        Some("json") => from_json(&text),
        _ => return Err(Failure::usage(format!("{}: expected a .json or .aut file", path.display()))),
    };
    lts.map_err(lift)
}

fn render_text(lts: &Lts) -> String {
    let mut out = format!("root {}\n", lts.root());
    for (f, l, t) in lts.transitions() {
        let _ = writeln!(out, "{f} --{l}--> {t}");
    }
    for s in lts.terminating_states() {
        let _ = writeln!(out, "{s} terminates");
    }
    out
}

fn process(
    program: &ProgramInput,
    uses: &[String],
    hidden: &[String],
    format: Option<Format>,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let bound = state_bound()?;
    let mut labels = BTreeSet::from([ActionLabel::Stop]);
    for h in hidden {
        labels.insert(h.parse::<ActionLabel>().map_err(lift)?);
    }
    let services = attachments(uses)?;
    let lc = if extension(&program.input) == Some("lps") && program.notation.is_none() {
        if !services.is_empty() {
            return Err(Failure::usage("--use needs a program, not a process specification"));
        }
        let e = parse_linear_process_spec(&read(&program.input)?)?;
        lts_from_linear_spec(&e, e.root()).map_err(lift)?
    } else {
        let mut lc = pextr_c(&extract_thread(&load_sequence(program)?));
        for (focus, h) in &services {
            lc = use_process_lts(&lc, focus, h, bound)?;
        }
        lc
    };
    let lts = abstract_labels(&lc, &labels);
    let format = format.unwrap_or(match output.and_then(extension) {
        Some("aut") => Format::Aut,
        Some("txt") => Format::Text,
        _ => Format::Json,
    });
    let text = match format {
        Format::Json => to_json(&lts),
        Format::Aut => to_aut(&lts),
        Format::Text => render_text(&lts),
    };
    write(output, &text)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Canon { input, output } => {
            let term = parse_pga(&read(&input)?).map_err(lift)?;
            write(output.as_deref(), &line(canonical_form(&term)))?;
        }
        Command::Translate { input, output } => {
            let p = parse_pgld(&read(&input)?).map_err(lift)?;
            write(output.as_deref(), &line(pgld_to_pga(&p)))?;
        }
        Command::Thread { program, uses, output } => {
            let bound = state_bound()?;
            let services = attachments(&uses)?;
            let mut thread: ThreadAutomaton = extract_thread(&load_sequence(&program)?);
            for (focus, h) in &services {
                thread = use_thread(&thread, focus, h, bound)?;
            }
            write(output.as_deref(), &to_linear_spec(&thread).to_string())?;
        }
        Command::Process {
            program,
            uses,
            hidden,
            format,
            output,
        } => process(&program, &uses, &hidden, format, output.as_deref())?,
        Command::Synth {
            input,
            mode,
            tact,
            output,
        } => {
            let e = parse_linear_process_spec(&read(&input)?)?;
            let p = match mode {
                Mode::Multi => synth_multireply(&e),
                Mode::Binary => synth_binary(&e, &tact),
            }
            .map_err(lift)?;
            write(output.as_deref(), &line(p))?;
        }
        Command::SingleOccurrence { input, output } => {
            let p = parse_pgld(&read(&input)?).map_err(lift)?;
            let (q, registers) = to_single_occurrence(&p).map_err(lift)?;
            eprintln!("registers: {registers}");
            write(output.as_deref(), &line(q))?;
        }
        Command::Equiv {
            kind,
            root_tau,
            left,
            right,
        } => {
            let (mut p, mut q) = (load_lts(&left)?, load_lts(&right)?);
            if root_tau {
                p = tau_prefix(&p);
                q = tau_prefix(&q);
            }
            let equivalent = match kind {
                Kind::Strong => strong_bisimilar(&p, &q),
                Kind::Rbranching => rooted_branching_bisimilar(&p, &q),
            };
            println!("{}", if equivalent { "equivalent" } else { "not equivalent" });
            return Ok(if equivalent { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("isaw: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
