use clap::Parser;

use scrap_core::cli::{run, Args, EXIT_INVALID, EXIT_OK};

fn main() {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_INVALID } else { EXIT_OK });
        }
    };
    std::process::exit(run(&args));
}
