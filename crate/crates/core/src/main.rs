fn main() {
    std::process::exit(qubit_boundstate::cli::run(std::env::args_os()));
}
