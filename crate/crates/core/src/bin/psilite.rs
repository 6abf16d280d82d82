fn main() {
    std::process::exit(psilite::cli::run(std::env::args().skip(1)));
}
