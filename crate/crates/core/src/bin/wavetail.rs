use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use wavetail::cli::{run_value, RunConfig, Task};
use wavetail::verify::Suite;
use wavetail::Error;

/// Jost-function spectral evolution and late-time tail verification.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "WAVETAIL_THREADS")]
    threads: Option<usize>,
    /// Verification suite: free, lemmas, spectral, price_law, family.
    #[arg(long)]
    suite: Option<String>,
}

fn load(args: &Args) -> (Result<RunConfig, Error>, Value) {
    let suite = match args.suite.as_deref().map(str::parse::<Suite>).transpose() {
        Ok(s) => s,
        Err(e) => return (Err(e), Value::Null),
    };
    let Some(path) = &args.config else {
        return match suite {
            Some(s) => {
                let raw = serde_json::json!({ "task": "verify", "suite": s });
                (RunConfig::from_json(&raw.to_string()), raw)
            }
            None => (Err(Error::Config("need --config or --suite".into())), Value::Null),
        };
    };
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return (Err(Error::Config(format!("{}: {e}", path.display()))), Value::Null),
    };
    let raw: Value = serde_json::from_str(&text).unwrap_or(Value::Null);
    let cfg = RunConfig::from_json(&text).map(|mut c| {
        if let Some(s) = suite {
            c.task = Task::Verify;
            c.suite = Some(s);
        }
        c
    });
    (cfg, raw)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: CONFIG: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let (cfg, raw) = load(&args);
    let out = args
        .out
        .clone()
        .or_else(|| cfg.as_ref().ok().and_then(|c| c.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    match run_value(cfg, raw, &out) {
        Ok(m) => {
            if m.task == Some(Task::Verify) {
                if let Ok(text) = fs::read_to_string(out.join("verify.txt")) {
                    print!("{text}");
                }
            }
            println!("ok: {} artifact(s) in {}", m.artifacts.len(), out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
