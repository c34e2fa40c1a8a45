mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use qsurrogate::{Error, ErrorKind};

use args::Cli;

fn exit_code(err: &Error) -> u8 {
    match err.kind() {
        ErrorKind::Io => 2,
        ErrorKind::Numerical => 3,
        ErrorKind::Precondition => 4,
    }
}

fn init_logging(json: bool) {
    let builder = tracing_subscriber::fmt().with_writer(std::io::stderr).with_max_level(tracing::Level::INFO);
    if json {
        builder.json().init();
    } else {
        builder.with_target(false).init();
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging(cli.global.json_logs);
    match commands::run(&cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let report = serde_json::json!({
                "error": err.code(),
                "kind": format!("{:?}", err.kind()).to_lowercase(),
                "message": err.to_string(),
            });
            eprintln!("{report}");
            ExitCode::from(exit_code(&err))
        }
    }
}
