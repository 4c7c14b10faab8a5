fn main() {
    std::process::exit(kepler_tyz::cli::run(std::env::args_os()));
}
