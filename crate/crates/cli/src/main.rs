mod args;
mod builtins;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;
use monotone_core::{Rational, Tolerance};

use args::{Backend, Cli};
use commands::Context;
use io::{flatten, read_document, CliError, CliResult, Outcome};

fn tolerance(cli: &Cli) -> CliResult<Tolerance> {
    let g = &cli.global;
    match g.backend {
        Backend::Exact if g.tol_abs.is_some() || g.tol_rel.is_some() => Err(CliError::Usage(
            "--tol-abs/--tol-rel cannot be combined with --backend exact".into(),
        )),
        Backend::Exact => Ok(Tolerance::exact()),
        Backend::Float => {
            let d = Tolerance::default();
            Tolerance::new(g.tol_abs.unwrap_or(d.abs), g.tol_rel.unwrap_or(d.rel))
                .map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    let tol = tolerance(cli)?;
    let doc = if cli.command.needs_input() {
        Some(read_document(cli.global.input.as_deref())?)
    } else {
        None
    };
    let cx = Context {
        doc: doc.as_ref(),
        tol,
        seed: cli.global.seed,
    };
    if commands::is_float_only(&cli.command, doc.as_ref()) {
        if cli.global.backend == Backend::Exact {
            return Err(CliError::Usage(
                "this operation is only available with --backend float".into(),
            ));
        }
        return commands::float_only(&cli.command, &cx);
    }
    let out = match cli.global.backend {
        Backend::Float => commands::generic::<f64>(&cli.command, &cx)?,
        Backend::Exact => commands::generic::<Rational>(&cli.command, &cx)?,
    };
    Ok(out.expect("every command is either generic or float-only"))
}

fn render(cli: &Cli, out: &Outcome) -> String {
    if cli.global.table {
        out.table.clone().unwrap_or_else(|| flatten(&out.value))
    } else {
        serde_json::to_string_pretty(&out.value).expect("JSON values always encode") + "\n"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = render(&cli, &out);
    let written = match &cli.global.output {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match out.verdict {
        Some(false) => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    }
}
