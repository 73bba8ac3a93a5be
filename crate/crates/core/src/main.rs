fn main() {
    std::process::exit(pureform::cli::main_with_args(std::env::args_os()));
}
