fn main() {
    std::process::exit(nim_sierpinski::cli::main_with_args(std::env::args_os()));
}
