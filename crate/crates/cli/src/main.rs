use std::process::ExitCode;

use clap::Parser;

use r2d_cli::{load, run_command, Cli};

/// The arguments that shape the report; output destinations are left out.
fn echo(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--out" || a == "--diagram" {
            it.next();
        } else if !(a.starts_with("--out=") || a.starts_with("--diagram=")) {
            out.push(a.clone());
        }
    }
    out
}

fn run(cli: &Cli, argv: Vec<String>) -> Result<bool, String> {
    let name = cli.model.as_deref().ok_or("--model <path or bundled name> is required")?;
    let model = load(name).map_err(|e| e.to_string())?;
    let doc = run_command(&cli.command, argv, &model).map_err(|e| e.to_string())?;
    let text = doc.render();
    match &cli.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display()))?,
        None => print!("{text}"),
    }
    if let Some(p) = &cli.diagram {
        let dot = doc
            .section
            .diagram
            .as_ref()
            .ok_or("--diagram: this command produces no diagram")?;
        std::fs::write(p, dot).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(!doc.has_error())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(&cli, echo(&args[1..])) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
