fn main() {
    std::process::exit(geopspline::cli::run(std::env::args_os()));
}
