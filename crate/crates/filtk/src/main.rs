use clap::Parser;

fn main() {
    let args = filtk::cli::Cli::parse();
    let outcome = filtk::cli::run(&args);
    if !outcome.stdout.is_empty() {
        print!("{}", outcome.stdout);
    }
    if !outcome.stderr.is_empty() {
        eprint!("{}", outcome.stderr);
    }
    std::process::exit(outcome.code);
}
