use clap::Parser;

use gearkin_cli::app::{run, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}
