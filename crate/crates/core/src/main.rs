fn main() {
    std::process::exit(adjointforge::cli::run(std::env::args_os()));
}
