fn main() {
    std::process::exit(polarimeter::cli::run(std::env::args_os()));
}
