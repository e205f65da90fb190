fn main() {
    std::process::exit(boxaffine_cli::run(std::env::args_os()));
}
