use std::process::exit;

fn main() {
    exit(itl::cli::cmd_dispatch(std::env::args()));
}
