fn main() {
    std::process::exit(oswec_cli::main_with_args(std::env::args_os()));
}
