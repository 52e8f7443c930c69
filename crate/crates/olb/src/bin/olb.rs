fn main() {
    std::process::exit(olb::cli::run(std::env::args_os()));
}
