fn main() {
    std::process::exit(parcs_cli::run(std::env::args_os()));
}
