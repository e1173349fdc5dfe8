use std::io::Write;

fn main() {
    let outcome = dirac_moyal::cli::run(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(outcome.stdout.as_bytes());
    let _ = stdout.flush();
    eprint!("{}", outcome.stderr);
    std::process::exit(outcome.code);
}
