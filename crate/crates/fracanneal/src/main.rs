fn main() {
    std::process::exit(fracanneal::cli::main_with_args(std::env::args_os()));
}
