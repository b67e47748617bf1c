fn main() {
    std::process::exit(funcineq_cli::main_with(std::env::args_os()));
}
