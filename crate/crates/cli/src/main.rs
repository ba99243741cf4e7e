fn main() {
    std::process::exit(wsc_cli::run(std::env::args_os()));
}
