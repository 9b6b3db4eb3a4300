fn main() {
    std::process::exit(decadic_cli::run(std::env::args_os()));
}
