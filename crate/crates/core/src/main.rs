use clap::Parser;

use tpm_lab::cli::{self, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let args = Cli::parse();
    std::process::exit(cli::run(&args).code());
}
