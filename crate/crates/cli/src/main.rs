fn main() {
    std::process::exit(gsmon_cli::run(std::env::args_os()));
}
