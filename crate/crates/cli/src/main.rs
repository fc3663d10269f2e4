fn main() {
    std::process::exit(hg_cli::run())
}
