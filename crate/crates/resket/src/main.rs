fn main() {
    std::process::exit(resket::cli::main_with_args(std::env::args_os()));
}
