fn main() {
    std::process::exit(railwave::cli::run(std::env::args_os()));
}
