fn main() {
    std::process::exit(femtocell_cli::main_with_args(std::env::args_os()));
}
