use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let (code, out) = gcdissect::cli::run(&args);
    if !out.is_empty() {
        // A closed pipe is not an error worth a panic.
        let _ = writeln!(std::io::stdout(), "{out}");
    }
    std::process::exit(code);
}
