fn main() {
    std::process::exit(katugampola::cli::main_with_args(std::env::args_os()));
}
