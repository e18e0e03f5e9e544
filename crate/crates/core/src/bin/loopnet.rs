fn main() {
    std::process::exit(loopnet::cli::run_from(std::env::args_os()));
}
