fn main() {
    std::process::exit(ancilla_cli::run(std::env::args_os()));
}
