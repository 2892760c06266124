fn main() {
    std::process::exit(levy_hit::cli::run(std::env::args_os()));
}
