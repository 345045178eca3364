fn main() {
    std::process::exit(perfport::run_cli(std::env::args_os()));
}
