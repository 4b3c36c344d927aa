use clap::Parser;

fn main() {
    let cli = idiom_forge::Cli::parse();
    if let Err(err) = idiom_forge::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
