fn main() {
    std::process::exit(kleincount::cli::run(std::env::args().collect()));
}
