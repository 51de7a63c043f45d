//! Command-line driver: runs experiment configurations, lists presets, and
//! dumps Fourier-Jacobi expansions.
//!
//! Exit codes: 0 when every configured assertion passes, 2 on assertion
//! failure, 1 on configuration or hypothesis errors.

mod config;
mod manifest;
mod presets;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;
use manifest::RunManifest;

#[derive(Parser)]
#[command(name = "ulab", version, about = "weighted approximation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config (a JSON path or `preset:NAME`).
    Run(RunArgs),
    /// List bundled presets; optionally write them out as JSON files.
    Presets(PresetArgs),
    /// Expand a function in an orthonormal Jacobi basis and print the
    /// coefficients as JSON.
    Expand(ExpandArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file path, or `preset:NAME`.
    config: String,
    /// Dotted-path overrides, e.g. `--set params.eps=0.3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory for the report files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Which report files to write.
    #[arg(long, default_value = "both", value_parser = ["json", "csv", "both"])]
    format: String,
}

#[derive(Args)]
struct PresetArgs {
    /// Write every preset as `<DIR>/<name>.json`.
    #[arg(long, value_name = "DIR")]
    write: Option<PathBuf>,
}

#[derive(Args)]
struct ExpandArgs {
    /// Function family: bump | power-one-minus-x | cosine | psi | polynomial.
    #[arg(long)]
    family: String,
    /// Comma-separated family parameters, e.g. `n=64,m=4` or `k=3`.
    #[arg(long, default_value = "")]
    params: String,
    /// Basis indices as `alpha,beta`.
    #[arg(long, default_value = "0,0")]
    basis: String,
    /// Number of coefficients (expansion runs to this degree).
    #[arg(long)]
    degree: usize,
    /// Optional output directory (also prints to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("ULAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(args),
        Command::Presets(args) => list_presets(args),
        Command::Expand(args) => expand(args),
    }
}

fn run(args: RunArgs) -> ExitCode {
    let (name, text) = match load_config_text(&args.config) {
        Ok(pair) => pair,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(1);
        }
    };
    let mut cfg = match ExperimentConfig::from_json(&text) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    };
    for spec in &args.set {
        if let Err(e) = cfg.apply_override(spec) {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    }

    let (report, verdicts) = match cfg.execute() {
        Ok(out) => out,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };

    let manifest = RunManifest::new(
        serde_json::to_value(&cfg).expect("config serializes"),
        report,
        verdicts,
    );
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("cannot create output directory: {e}");
        return ExitCode::from(1);
    }
    if args.format == "json" || args.format == "both" {
        let path = args.out.join(format!("{name}.json"));
        if let Err(e) = manifest.write_json(&path) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
        println!("wrote {}", path.display());
    }
    if args.format == "csv" || args.format == "both" {
        let path = args.out.join(format!("{name}.csv"));
        if let Err(e) = manifest.write_csv(&path) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
        println!("wrote {}", path.display());
    }

    for v in &manifest.verdicts {
        println!("{} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    println!(
        "{}: max ratio {:.6e}, {} rows",
        manifest.experiment,
        manifest.report.summary.max_ratio,
        manifest.report.rows.len()
    );
    if manifest.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn load_config_text(spec: &str) -> Result<(String, String), String> {
    if let Some(name) = spec.strip_prefix("preset:") {
        let text = presets::find(name).ok_or_else(|| format!("unknown preset {name:?}"))?;
        return Ok((name.to_string(), text.to_string()));
    }
    let path = Path::new(spec);
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((stem, text))
}

fn list_presets(args: PresetArgs) -> ExitCode {
    for (name, description, _) in presets::PRESETS {
        println!("{name:30} {description}");
    }
    if let Some(dir) = args.write {
        if let Err(e) = std::fs::create_dir_all(&dir) {
            eprintln!("cannot create {}: {e}", dir.display());
            return ExitCode::from(1);
        }
        for (name, _, text) in presets::PRESETS {
            let path = dir.join(format!("{name}.json"));
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        println!("wrote {} presets to {}", presets::PRESETS.len(), dir.display());
    }
    ExitCode::SUCCESS
}

fn expand(args: ExpandArgs) -> ExitCode {
    let f = match parse_family(&args.family, &args.params) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(1);
        }
    };
    let (alpha, beta) = match parse_pair(&args.basis) {
        Ok(pair) => pair,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cfg = ExperimentConfig {
        experiment: "expand".to_string(),
        params: serde_json::json!({ "f": f, "alpha": alpha, "beta": beta, "degree": args.degree }),
        assert: Default::default(),
        seed: None,
    };
    let (report, verdicts) = match cfg.execute() {
        Ok(out) => out,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report.metadata["coefficients"]).expect("serializable")
    );
    if let Some(dir) = args.out {
        let manifest =
            RunManifest::new(serde_json::to_value(&cfg).expect("serializable"), report, verdicts);
        if std::fs::create_dir_all(&dir).is_err() {
            return ExitCode::from(1);
        }
        if manifest.write_json(&dir.join("expand.json")).is_err()
            || manifest.write_csv(&dir.join("expand.csv")).is_err()
        {
            return ExitCode::from(1);
        }
    }
    ExitCode::SUCCESS
}

fn parse_pair(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `alpha,beta`, got {text:?}"));
    }
    let alpha = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let beta = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((alpha, beta))
}

fn parse_family(family: &str, params: &str) -> Result<serde_json::Value, String> {
    let mut map = serde_json::Map::new();
    map.insert("family".to_string(), serde_json::Value::String(family.to_string()));
    for item in params.split(',').filter(|s| !s.trim().is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| format!("family parameter {item:?} must look like key=value"))?;
        let parsed: serde_json::Value = serde_json::from_str(value.trim())
            .map_err(|e| format!("cannot parse {value:?}: {e}"))?;
        map.insert(key.trim().to_string(), parsed);
    }
    Ok(serde_json::Value::Object(map))
}
