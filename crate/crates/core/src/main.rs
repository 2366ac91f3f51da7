fn main() {
    std::process::exit(levymap::cli::run(std::env::args_os()));
}
