fn main() {
    std::process::exit(hitr::cli::run(std::env::args_os()));
}
