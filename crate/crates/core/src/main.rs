fn main() {
    std::process::exit(noneuclid::cli::main_with_args(std::env::args_os()));
}
