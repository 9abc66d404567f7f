fn main() {
    std::process::exit(opsplit::cli::run(std::env::args_os()));
}
