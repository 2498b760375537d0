use std::process::ExitCode;

fn main() -> ExitCode {
    noonbell::cli::main()
}
