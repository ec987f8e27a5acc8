use clap::Parser;

fn main() {
    std::process::exit(vak::cli::main_with(vak::cli::Cli::parse()));
}
