use clap::Parser;

fn main() {
    let cli = sbd::cli::Cli::parse();
    if let Err(e) = sbd::cli::run(&cli) {
        eprintln!("sbd: error: {e:#}");
        std::process::exit(1);
    }
}
