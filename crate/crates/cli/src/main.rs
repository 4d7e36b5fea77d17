fn main() {
    std::process::exit(magschro_cli::cli::run(std::env::args_os()));
}
