//! `nrb`: batch front end for checking triples, computing weakest
//! preconditions, generating and checking derivations and exporting models.

mod commands;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::Value;

use commands::Session;
use report::{Class, Report};

#[derive(Debug, Parser)]
#[command(name = "nrb", version, about = "Verification toolkit for goto, break, return and exceptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Opts {
    /// Cross-check a computed weakest precondition against brute force
    #[arg(long, global = true)]
    pub verify: bool,

    /// Write the model as a Graphviz digraph
    #[arg(long, value_name = "PATH", global = true)]
    pub dot: Option<PathBuf>,

    /// Write the model transitions (model) or the report (other commands) as JSON
    #[arg(long, value_name = "PATH", global = true)]
    pub json: Option<PathBuf>,

    /// Refuse state spaces larger than this
    #[arg(long, env = "NRB_MAX_STATES", default_value_t = 1_000_000, global = true)]
    pub max_states: u64,

    /// Failing transitions listed per failed check
    #[arg(long, default_value_t = 5, global = true)]
    pub max_counterexamples: usize,

    /// Run the command once per file in DIR and report a JSON array
    #[arg(long, value_name = "DIR", global = true)]
    pub suite: Option<PathBuf>,

    /// Drop the G_l clause of the consequence rule
    #[arg(long, global = true)]
    pub lax_conseq: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a judgement against the program's model
    Check {
        program: PathBuf,
        judgement: Option<PathBuf>,
    },
    /// Weakest precondition of the program's main statement
    Wp {
        program: PathBuf,
        /// Postcondition text, or a file containing it
        post: Option<String>,
    },
    /// Generate a derivation and check it with the kernel
    Prove {
        program: PathBuf,
        judgement: Option<PathBuf>,
        /// Where to write the proof (a directory with --suite)
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Check a derivation written as JSON
    CheckProof { program: PathBuf, proof: Option<PathBuf> },
    /// Compute the transition model of the program's main statement
    Model { program: Option<PathBuf> },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Wp { .. } => "wp",
            Command::Prove { .. } => "prove",
            Command::CheckProof { .. } => "check-proof",
            Command::Model { .. } => "model",
        }
    }
}

fn timed(run: impl FnOnce() -> Report) -> Report {
    let t0 = Instant::now();
    let mut r = run();
    r.elapsed_ms = t0.elapsed().as_millis();
    r
}

fn single(cmd: &Command, opts: &Opts) -> Report {
    let name = cmd.name();
    timed(|| {
        let run = || -> Result<Report, Report> {
            match cmd {
                Command::Model { program } => {
                    let Some(program) = program else {
                        return Err(Report::error(name, Class::Input, "no program file given"));
                    };
                    Session::load(name, program, opts)?.model(opts.dot.as_deref(), opts.json.as_deref())
                }
                Command::Check { program, judgement } => {
                    let s = Session::load(name, program, opts)?;
                    s.check(&required(name, judgement.as_deref(), "judgement")?)
                }
                Command::Wp { program, post } => {
                    let s = Session::load(name, program, opts)?;
                    let Some(post) = post else {
                        return Err(Report::error(name, Class::Input, "no postcondition given"));
                    };
                    let text = match Path::new(post).is_file() {
                        true => commands::read(name, Path::new(post))?,
                        false => post.clone(),
                    };
                    s.wp(&text)
                }
                Command::Prove { program, judgement, output } => {
                    let s = Session::load(name, program, opts)?;
                    s.prove(&required(name, judgement.as_deref(), "judgement")?, output.as_deref())
                }
                Command::CheckProof { program, proof } => {
                    let s = Session::load(name, program, opts)?;
                    s.check_proof(&required(name, proof.as_deref(), "proof")?)
                }
            }
        };
        run().unwrap_or_else(|r| r)
    })
}

fn required(name: &'static str, path: Option<&Path>, what: &str) -> Result<PathBuf, Report> {
    path.map(Path::to_path_buf)
        .ok_or_else(|| Report::error(name, Class::Input, format!("no {what} file given (or use --suite)")))
}

/// The command once per regular file of `dir`, in name order. In a suite the
/// per-file argument is the file; the program stays fixed except for
/// `model`, whose files are programs.
fn suite(cmd: &Command, opts: &Opts, dir: &Path) -> Result<Vec<(String, Report)>, Report> {
    let name = cmd.name();
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Report::error(name, Class::Input, format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        let label = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let each = match cmd {
            Command::Check { program, .. } => Command::Check {
                program: program.clone(),
                judgement: Some(f),
            },
            Command::Wp { program, .. } => Command::Wp {
                program: program.clone(),
                post: Some(f.to_string_lossy().into_owned()),
            },
            Command::Prove { program, output, .. } => Command::Prove {
                program: program.clone(),
                output: output.as_ref().map(|d| d.join(format!("{label}.proof.json"))),
                judgement: Some(f),
            },
            Command::CheckProof { program, .. } => Command::CheckProof {
                program: program.clone(),
                proof: Some(f),
            },
            Command::Model { .. } => Command::Model { program: Some(f) },
        };
        // Per-file artefacts make no sense for a whole directory.
        let each_opts = Opts {
            dot: None,
            json: None,
            ..opts.clone()
        };
        out.push((label, single(&each, &each_opts)));
    }
    Ok(out)
}

fn emit(value: &Value, json_out: Option<&Path>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    println!("{text}");
    if let Some(path) = json_out {
        std::fs::write(path, format!("{text}\n")).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = &cli.opts;
    let is_model = matches!(cli.command, Command::Model { .. });
    let report_out = if is_model { None } else { opts.json.as_deref() };

    let (value, code) = match &opts.suite {
        None => {
            let r = single(&cli.command, opts);
            (r.to_json(), r.exit_code())
        }
        Some(dir) => match suite(&cli.command, opts, dir) {
            Ok(reports) => {
                let code = reports.iter().map(|(_, r)| r.exit_code()).find(|&c| c != 0).unwrap_or(0);
                let items = reports
                    .into_iter()
                    .map(|(file, r)| {
                        let mut v = r.to_json();
                        v["input"] = Value::String(file);
                        v
                    })
                    .collect();
                (Value::Array(items), code)
            }
            Err(r) => (r.to_json(), r.exit_code()),
        },
    };
    if let Err(e) = emit(&value, report_out) {
        eprintln!("nrb: {e}");
        return ExitCode::from(Class::Runtime.exit_code() as u8);
    }
    ExitCode::from(code as u8)
}
