use clap::Parser;
use localsgd::cli::{execute, Cli};

fn main() {
    std::process::exit(execute(Cli::parse()));
}
