fn main() {
    std::process::exit(gme_cli::run_cli(std::env::args_os()));
}
