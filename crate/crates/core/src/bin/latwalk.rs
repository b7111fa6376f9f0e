fn main() {
    std::process::exit(latwalk::cli::main_with_args(std::env::args_os()));
}
