fn main() {
    std::process::exit(critline::cli::run(std::env::args_os()));
}
