fn main() {
    std::process::exit(indefsl::cli::run(std::env::args().skip(1)));
}
