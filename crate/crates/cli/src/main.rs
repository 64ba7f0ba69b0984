fn main() {
    std::process::exit(equisep_cli::main_with_args(std::env::args_os()));
}
