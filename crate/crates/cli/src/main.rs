fn main() {
    std::process::exit(transmission_cli::run(std::env::args_os()));
}
