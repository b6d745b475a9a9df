use clap::Parser;
use treecochain::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
