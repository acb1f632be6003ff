fn main() {
    std::process::exit(hetq_cli::main_with(std::env::args_os()));
}
