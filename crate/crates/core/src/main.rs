fn main() {
    std::process::exit(qic_core::cli::run(std::env::args_os()));
}
