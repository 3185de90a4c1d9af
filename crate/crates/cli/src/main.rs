use clap::Parser;
use tube_geodesics_cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
