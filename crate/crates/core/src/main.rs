fn main() {
    std::process::exit(localpower::cli::run(std::env::args_os()));
}
