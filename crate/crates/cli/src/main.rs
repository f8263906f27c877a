use clap::Parser;
use fdqm_cli::{run, Cli, EXIT_OK};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for path in &outcome.written {
                println!("wrote {}", path.display());
            }
            std::process::exit(EXIT_OK);
        }
        Err(e) => {
            eprintln!("fdqm: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
