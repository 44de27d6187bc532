use std::process::exit;

fn main() {
    exit(invforge::cli::run(std::env::args_os()));
}
