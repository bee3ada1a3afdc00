fn main() {
    std::process::exit(kgcert::cli::main_with_args(std::env::args_os()));
}
