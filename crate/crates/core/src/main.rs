fn main() {
    std::process::exit(nearcurve::cli::run(std::env::args()));
}
