use clap::Parser;

use hamsolve::cli::{execute, parse_config};

/// Batch solver for nonlinear Volterra-Fredholm integro-differential
/// equations: reads a problem/method configuration, prints iterate
/// expressions and writes CSV comparison tables.
#[derive(Parser)]
#[command(name = "hamsolve", version)]
struct Args {
    /// Path to the configuration file.
    config: String,

    /// Run only the method with this label.
    #[arg(long)]
    only: Option<String>,

    /// Parse and validate the configuration without solving.
    #[arg(long)]
    check: bool,
}

fn main() {
    let args = Args::parse();
    let code = run(&args);
    std::process::exit(code);
}

fn run(args: &Args) -> i32 {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("error: cannot read '{}': {err}", args.config);
            return 1;
        }
    };
    let mut spec = match parse_config(&text) {
        Ok(spec) => spec,
        Err(err) => {
            eprintln!("error: {}: {err}", args.config);
            return 2;
        }
    };
    if let Some(label) = &args.only {
        spec.methods.retain(|m| &m.label == label);
        if spec.methods.is_empty() {
            eprintln!("error: no method labelled '{label}' in '{}'", args.config);
            return 2;
        }
    }
    if args.check {
        println!(
            "ok: {} method(s), order {}, domain [{}, {}]",
            spec.methods.len(),
            spec.problem.p,
            spec.problem.domain.0,
            spec.problem.domain.1
        );
        return 0;
    }
    match execute(&spec) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
