fn main() {
    std::process::exit(usat::cli::run_cli(std::env::args()));
}
