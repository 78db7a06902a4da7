use clap::Parser;
use qeci::cli::{run, Cli, EXIT_PARSE};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            std::process::exit(code);
        }
    };
    let code = run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
