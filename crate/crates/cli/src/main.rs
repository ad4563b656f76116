use clap::Parser;
use spectra_theta::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("spectra-theta: {e}");
        std::process::exit(e.exit_code());
    }
}
