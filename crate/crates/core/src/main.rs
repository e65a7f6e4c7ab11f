fn main() {
    std::process::exit(padist::cli::run(std::env::args_os()));
}
