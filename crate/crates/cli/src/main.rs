mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{splice_config, Cli, Command};

fn main() -> ExitCode {
    let argv = match splice_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be positive");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let out = cli.out.as_deref();
    let result = match &cli.command {
        Command::Check(a) => commands::check(a, out),
        Command::Falsify(a) => commands::falsify_cmd(a, out),
        Command::Deform(a) => commands::deform(a, out),
        Command::Velocity(a) => commands::velocity(a, out),
        Command::Fourier(a) => commands::fourier(a, out),
        Command::Cone(a) => commands::cone(a, out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
