fn main() {
    std::process::exit(ridgelaw::cli::run_command(std::env::args()));
}
