fn main() {
    std::process::exit(modspace::cli::main_with_args(std::env::args_os().skip(1)));
}
