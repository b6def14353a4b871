use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    match fracperc_cli::run(std::env::args_os()) {
        Ok(lines) => {
            let mut out = std::io::stdout().lock();
            for line in lines {
                // A closed pipe (e.g. `| head`) is not an error; outputs are already written.
                if writeln!(out, "{}", line.trim_end()).is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fracperc: {}", e.message.trim_end());
            ExitCode::from(e.code as u8)
        }
    }
}
