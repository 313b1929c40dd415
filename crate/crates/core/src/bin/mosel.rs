use clap::Parser;

fn main() {
    let cli = mosel::cli::Cli::parse();
    if let Err(e) = mosel::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
