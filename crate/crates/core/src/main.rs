fn main() {
    std::process::exit(cvteleport::cli::main_with_args(std::env::args_os()));
}
