mod args;
mod cache;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use jacobi_core::Error;

use args::Cli;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    match commands::run(&cli.config, &cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            let _ = std::io::stdout().flush();
            if outcome.witnesses.is_empty() {
                return ExitCode::SUCCESS;
            }
            for (name, w) in &outcome.witnesses {
                let path = cli.config.out_dir.join(format!("witness-{name}.json"));
                let text = serde_json::to_string_pretty(w).expect("serializable");
                match cache::write_atomic(&path, &text) {
                    Ok(()) => log::error!("{name} failed; witness in {}", path.display()),
                    Err(e) => log::error!("{name} failed; could not write witness: {e:#}"),
                }
            }
            ExitCode::from(EXIT_FAILED)
        }
        Err(e) => match e.downcast_ref::<Error>() {
            Some(Error::ResourceLimit { what, cap, partial }) => {
                let path = cli.config.out_dir.join("partial-manifest.json");
                let manifest = commands::partial_manifest(&argv, what, *cap, *partial);
                let text = serde_json::to_string_pretty(&manifest).expect("serializable");
                if let Err(w) = cache::write_atomic(&path, &text) {
                    log::error!("could not write {}: {w:#}", path.display());
                }
                eprintln!("error: {e}; partial manifest in {}", path.display());
                ExitCode::from(EXIT_RESOURCE)
            }
            Some(_) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_USAGE)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_FAILED)
            }
        },
    }
}
