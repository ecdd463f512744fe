fn main() {
    std::process::exit(radial_mult::cli::run(std::env::args_os()));
}
