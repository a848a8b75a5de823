use clap::Parser;
use cli_io::cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(f) = run(&cli) {
        eprintln!("error: {}", f.message());
        std::process::exit(f.code());
    }
}
