fn main() {
    std::process::exit(drsc::cli::main_with_args(std::env::args_os()));
}
