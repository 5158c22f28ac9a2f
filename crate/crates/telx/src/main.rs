use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

/// Saturation and grammar parsing recurse over derivations; give them room.
const STACK_SIZE: usize = 256 * 1024 * 1024;

fn main() -> ExitCode {
    let cli = telx::Cli::parse();
    let handle = std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(move || {
            let result = telx::run(&cli);
            let (out, warnings) = telx::render(&result, cli.json);
            let mut stdout = std::io::stdout().lock();
            let mut stderr = std::io::stderr().lock();
            if result.is_ok() || cli.json {
                let _ = stdout.write_all(out.as_bytes());
            } else {
                let _ = stderr.write_all(out.as_bytes());
            }
            for w in warnings {
                let _ = writeln!(stderr, "{w}");
            }
            result.exit_code()
        })
        .expect("spawn worker thread");
    match handle.join() {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code as u8),
        Err(_) => ExitCode::from(101),
    }
}
