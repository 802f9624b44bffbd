use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use wildjl::cli::{run_scenario, run_suite, suite_exit, CliError, Options, Report, Scenario};

#[derive(Parser)]
#[command(name = "wildjl", version, about = "Transfer of simple types to inner forms, checked by exact character identities")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
    /// p-adic precision N (at least l + 3).
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of associate pairs per scenario.
    #[arg(long, global = true)]
    pairs: Option<usize>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the report (a JSON array for `suite`) here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Count all Lagrangians and enforce uniqueness of the stable one.
    #[arg(long, global = true)]
    enumerate_lagrangians: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario file.
    Run { file: PathBuf },
    /// Run every `*.toml` scenario in a directory.
    Suite { dir: PathBuf },
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summary(path: &Path, r: &Result<Report, CliError>, control: bool) -> String {
    let tag = if control { " (control)" } else { "" };
    match r {
        Ok(r) => {
            let eq = r.trace_rows.iter().filter(|x| x.equal).count();
            format!("{}: {}{tag}, {eq}/{} rows equal", path.display(), r.verdict, r.trace_rows.len())
        }
        Err(e) => format!("{}: ERROR {}{tag}: {e}", path.display(), e.exit_code()),
    }
}

fn run(args: &Args) -> Result<i32, CliError> {
    let opts = Options {
        precision: args.precision,
        seed: args.seed,
        pairs: args.pairs,
        enumerate_lagrangians: args.enumerate_lagrangians,
    };
    let t = Instant::now();
    match &args.cmd {
        Cmd::Run { file } => {
            let sc = Scenario::load(file)?;
            let r = run_scenario(&sc, &opts)?;
            write_out(&args.report, &r.to_json())?;
            eprintln!("{} ({:.2?})", summary(file, &Ok(r.clone()), sc.control), t.elapsed());
            Ok(r.exit_code())
        }
        Cmd::Suite { dir } => {
            let entries = run_suite(dir, &opts)?;
            for e in &entries {
                eprintln!("{}", summary(&e.path, &e.result, e.control));
            }
            let reports: Vec<&Report> = entries.iter().filter_map(|e| e.result.as_ref().ok()).collect();
            let mut text = serde_json::to_string_pretty(&reports).expect("reports serialize");
            text.push('\n');
            write_out(&args.report, &text)?;
            eprintln!("{} scenarios ({:.2?})", entries.len(), t.elapsed());
            Ok(suite_exit(&entries))
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(w) = args.workers {
        if w == 0 || rayon::ThreadPoolBuilder::new().num_threads(w).build_global().is_err() {
            eprintln!("config: cannot start {w} workers");
            return ExitCode::from(4);
        }
    }
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
