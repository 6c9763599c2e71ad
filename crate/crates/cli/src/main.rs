fn main() {
    std::process::exit(kiq_cli::run(std::env::args_os()));
}
