use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cycdesc_core::{problem_exit_code, run_task, task_exit_code, ProblemFile, Report, HARD_FAILURE_EXIT};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

/// Golden output differs from the computed output.
const GOLDEN_MISMATCH_EXIT: i32 = 43;
/// Print, parse, print is not stable.
const ROUND_TRIP_EXIT: i32 = 44;
const IO_EXIT: i32 = 2;

#[derive(Parser)]
#[command(name = "cycdesc", version, about = "Exact cycle and descent computations on affine schemes")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Problem file to run.
    file: Option<PathBuf>,
    /// Only run tasks with this command name.
    #[arg(long)]
    task: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print the normalized problem file instead of running tasks.
    #[arg(long)]
    print: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every bundled example and compare against its golden output.
    VerifyCorpus {
        /// Only files whose name matches this glob.
        #[arg(long)]
        filter: Option<String>,
        /// Corpus directory (defaults to the bundled one).
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Rewrite golden files from the current output.
        #[arg(long)]
        bless: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

enum Outcome {
    Report(Report),
    Failed { task: String, message: String, code: i32 },
}

/// Runs the selected tasks; returns the rendered output and the exit code.
fn run_file(text: &str, only: Option<&str>, format: Format) -> (String, i32) {
    let file = match ProblemFile::parse(text) {
        Ok(f) => f,
        Err(e) => {
            let code = problem_exit_code(&e);
            let out = match format {
                Format::Text => format!("parse error: {e}\nexit_code: {code}\n"),
                Format::Json => format!("{:#}\n", json!({"parse_error": e.to_string(), "exit_code": code})),
            };
            return (out, code);
        }
    };
    let mut code = 0;
    let mut outcomes = Vec::new();
    for t in file.tasks.iter().filter(|t| only.is_none_or(|o| t.command == o)) {
        match run_task(&file, t) {
            Ok(r) => {
                if r.hard_failure && code == 0 {
                    code = HARD_FAILURE_EXIT;
                }
                outcomes.push(Outcome::Report(r));
            }
            Err(e) => {
                let c = task_exit_code(&e);
                if code == 0 {
                    code = c;
                }
                outcomes.push(Outcome::Failed {
                    task: t.to_string(),
                    message: e.to_string(),
                    code: c,
                });
            }
        }
    }
    let out = match format {
        Format::Text => outcomes
            .iter()
            .map(|o| match o {
                Outcome::Report(r) => r.to_string(),
                Outcome::Failed { task, message, code } => format!("== {task}\nerror: {message}\nexit_code: {code}\n"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Json => {
            let items: Vec<Value> = outcomes.iter().map(outcome_json).collect();
            format!("{:#}\n", Value::Array(items))
        }
    };
    (out, code)
}

fn fields_json(fields: &[(String, String)]) -> Value {
    let mut m = Map::new();
    for (k, v) in fields {
        m.insert(k.clone(), Value::String(v.clone()));
    }
    Value::Object(m)
}

fn outcome_json(o: &Outcome) -> Value {
    match o {
        Outcome::Report(r) => {
            let stanzas: Vec<Value> = r
                .stanzas
                .iter()
                .map(|s| json!({"title": s.title, "fields": fields_json(&s.fields)}))
                .collect();
            json!({
                "task": r.task,
                "fields": fields_json(&r.fields),
                "stanzas": stanzas,
                "hard_failure": r.hard_failure,
            })
        }
        Outcome::Failed { task, message, code } => json!({"task": task, "error": message, "exit_code": code}),
    }
}

fn default_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn verify_one(path: &Path, bless: bool) -> Result<(), (i32, String)> {
    let io = |e: std::io::Error| (IO_EXIT, e.to_string());
    let text = fs::read_to_string(path).map_err(io)?;
    if let Ok(parsed) = ProblemFile::parse(&text) {
        let once = parsed.to_string();
        let twice = ProblemFile::parse(&once).map(|p| p.to_string());
        if twice.as_ref() != Ok(&once) {
            return Err((ROUND_TRIP_EXIT, "print/parse/print is not stable".into()));
        }
    }
    let (out, code) = run_file(&text, None, Format::Text);
    if code == HARD_FAILURE_EXIT {
        return Err((code, "a report records a hard failure".into()));
    }
    let golden = path.with_extension("golden");
    if bless {
        fs::write(&golden, &out).map_err(io)?;
        return Ok(());
    }
    let expected = fs::read_to_string(&golden).map_err(io)?;
    if expected != out {
        let line = expected
            .lines()
            .zip(out.lines())
            .position(|(a, b)| a != b)
            .unwrap_or(expected.lines().count().min(out.lines().count()));
        return Err((GOLDEN_MISMATCH_EXIT, format!("output differs from golden at line {}", line + 1)));
    }
    Ok(())
}

fn verify_corpus(dir: &Path, filter: Option<&str>, bless: bool) -> i32 {
    let pattern = match filter.map(glob::Pattern::new).transpose() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("invalid --filter: {e}");
            return IO_EXIT;
        }
    };
    let mut files: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "cyc"))
            .filter(|p| {
                let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
                pattern.as_ref().is_none_or(|pat| pat.matches(name))
            })
            .collect(),
        Err(e) => {
            eprintln!("cannot read corpus {}: {e}", dir.display());
            return IO_EXIT;
        }
    };
    files.sort();
    let results: Vec<_> = files.par_iter().map(|p| (p, verify_one(p, bless))).collect();
    let mut code = 0;
    for (p, r) in results {
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("?");
        match r {
            Ok(()) if bless => println!("BLESSED {name}"),
            Ok(()) => println!("PASS {name}"),
            Err((c, msg)) => {
                println!("FAIL {name}: {msg}");
                if code == 0 {
                    code = c;
                }
            }
        }
    }
    println!("{} files checked", files.len());
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match (cli.command, cli.file) {
        (Some(Command::VerifyCorpus { filter, corpus, bless }), _) => {
            verify_corpus(&corpus.unwrap_or_else(default_corpus), filter.as_deref(), bless)
        }
        (None, Some(path)) => match fs::read_to_string(&path) {
            Ok(text) if cli.print => match ProblemFile::parse(&text) {
                Ok(p) => {
                    print!("{p}");
                    0
                }
                Err(e) => {
                    eprintln!("parse error: {e}");
                    problem_exit_code(&e)
                }
            },
            Ok(text) => {
                let (out, code) = run_file(&text, cli.task.as_deref(), cli.format);
                print!("{out}");
                code
            }
            Err(e) => {
                eprintln!("cannot read {}: {e}", path.display());
                IO_EXIT
            }
        },
        (None, None) => {
            eprintln!("usage: cycdesc <FILE> [--task NAME] [--format text|json] | cycdesc verify-corpus [--filter GLOB]");
            IO_EXIT
        }
    };
    ExitCode::from(code as u8)
}
