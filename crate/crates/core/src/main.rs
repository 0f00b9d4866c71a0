fn main() {
    std::process::exit(wct::cli::run(std::env::args_os()));
}
