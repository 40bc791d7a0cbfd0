fn main() {
    std::process::exit(swarmnav::cli::run_cli(std::env::args_os()));
}
