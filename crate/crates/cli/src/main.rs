use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hartree_cli::{parse_config_for, run_experiment, Kind, Status, OUT_ENV};

/// Run one experiment from a flat `key = value` config.
#[derive(Parser, Debug)]
#[command(name = "hartree", version)]
struct Args {
    /// equilibrium-check, simulate, linear-response, stability-check,
    /// instability, picard, norms or scattering-probe
    kind: Kind,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to $HARTREE_OUT, then ./hartree-out.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match parse_config_for(Some(args.kind), &text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid config {}:\n{e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(s) = args.seed {
        cfg.numerics.seed = s;
    }
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cannot set thread count: {e}");
            return ExitCode::from(2);
        }
    }
    let dir = args
        .out
        .or_else(|| cfg.output.dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("hartree-out"))
        .join(cfg.kind.as_str());

    let env = run_experiment(&cfg);
    let path = match env.write(&dir) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot write results to {}: {e}", dir.display());
            return ExitCode::from(1);
        }
    };
    for v in &env.verdicts {
        println!("{} {} = {:e}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.value);
    }
    for w in &env.warnings {
        println!("warning: {w}");
    }
    if let Some(e) = &env.error {
        eprintln!("error: {e}");
    }
    let status = match env.status {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Error => "error",
    };
    println!("{status}: {}", path.display());
    ExitCode::from(env.exit_code() as u8)
}
