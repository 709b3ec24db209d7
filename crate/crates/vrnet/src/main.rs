use std::process::exit;

fn main() {
    exit(vrnet::cli::cli_main(std::env::args_os()));
}
