fn main() {
    std::process::exit(minmax_fne::cli::run_cli(std::env::args_os()));
}
