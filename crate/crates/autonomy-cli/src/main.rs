use clap::Parser;

use autonomy_cli::commands::{run, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}
