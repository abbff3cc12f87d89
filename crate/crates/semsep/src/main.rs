fn main() {
    std::process::exit(semsep::cli::run(std::env::args()));
}
