use std::io;

use clap::Parser;

use tigame::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let mut stdin = io::stdin().lock();
    let mut stdout = io::stdout().lock();
    let code = run(cli, &mut stdin, &mut stdout);
    std::process::exit(code);
}
