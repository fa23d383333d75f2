use clap::Parser;
use pompeiu_cli::{run, Cli, EXIT_VALIDATION};

fn main() {
    let config = match Cli::parse().into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(EXIT_VALIDATION);
        }
    };
    std::process::exit(run(&config));
}
