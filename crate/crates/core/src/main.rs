use clap::Parser;

fn main() {
    let cli = paoi::cli::Cli::parse();
    if let Err(e) = cli.run() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
