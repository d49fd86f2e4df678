fn main() {
    std::process::exit(rulescore::cli::run(std::env::args_os()));
}
