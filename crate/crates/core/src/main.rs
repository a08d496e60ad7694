use clap::Parser;

use headtrack::cli::{self, Cli};

fn main() {
    let code = cli::execute(Cli::parse());
    std::process::exit(code);
}
