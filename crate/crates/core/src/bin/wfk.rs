use clap::Parser;

fn main() {
    let cli = wfk::cli::Cli::parse();
    let code = match wfk::cli::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    std::process::exit(code);
}
