fn main() {
    let code = lesion_core::cli::main_with_args(std::env::args().collect());
    std::process::exit(code);
}
