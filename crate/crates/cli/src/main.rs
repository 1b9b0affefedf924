fn main() {
    std::process::exit(forgetbench_cli::run_cli(std::env::args_os()));
}
