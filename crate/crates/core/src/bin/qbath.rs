use clap::Parser;
use qbath::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    };
    std::process::exit(code);
}
