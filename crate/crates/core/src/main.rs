use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = roadpart::cli::Cli::parse();
    match roadpart::cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(roadpart::cli::CliError::StrictWarnings(n)) => {
            eprintln!("error: {n} warnings with --strict");
            std::process::exit(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
