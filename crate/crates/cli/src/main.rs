fn main() {
    std::process::exit(sparsepoly_cli::run_cli(std::env::args_os()));
}
