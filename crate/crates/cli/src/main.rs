use clap::Parser;

fn main() {
    let cli = kipq_cli::Cli::parse();
    std::process::exit(kipq_cli::run(&cli));
}
