fn main() {
    std::process::exit(z2weight::cli::main_with_args(std::env::args_os()));
}
