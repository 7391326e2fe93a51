fn main() {
    std::process::exit(openqdyn::cli::run_cli(std::env::args_os()));
}
