fn main() {
    std::process::exit(randcon_cli::cli::run());
}
