fn main() {
    std::process::exit(rcc_cli::run(std::env::args_os()));
}
