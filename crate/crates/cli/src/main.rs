fn main() {
    std::process::exit(gal_cli::run(std::env::args_os()));
}
