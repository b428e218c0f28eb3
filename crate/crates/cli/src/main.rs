use std::process::ExitCode;

use clap::Parser;
use drstack_cli::args::{Cli, Command};
use drstack_cli::commands::{self, Failure};
use drstack_cli::reproduce;

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Rank(a) => {
            let (_, table) = commands::rank(a, cli.threads)?;
            print!("{table}");
        }
        Command::Train(a) => {
            let doc = commands::train(a, cli.threads)?;
            println!(
                "trained {} on {} features -> {}",
                doc.kind,
                doc.n_features,
                a.data.out.display()
            );
        }
        Command::Predict(a) => {
            let preds = commands::predict(a, cli.threads)?;
            println!(
                "{} predictions -> {}",
                preds.len(),
                a.out.join("predictions.csv").display()
            );
        }
        Command::Evaluate(a) => {
            let r = commands::evaluate(a, cli.threads)?;
            print!(
                "{}",
                commands::summary_markdown(&format!("Cross-validation of {}", a.model), &r)
            );
        }
        Command::Reproduce(a) => {
            let o = reproduce::reproduce(a, cli.threads)?;
            print!("{}", o.reports.accuracy_grid.to_markdown());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let f = match cli.command {
                // Stage failures are runtime failures whatever their cause.
                Command::Reproduce(_) => Failure::Runtime(e),
                _ => Failure::classify(e),
            };
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
