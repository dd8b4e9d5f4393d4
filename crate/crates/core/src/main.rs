fn main() {
    std::process::exit(hyperwalk::cli::main_with_args(std::env::args_os()));
}
