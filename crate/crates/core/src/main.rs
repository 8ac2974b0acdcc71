fn main() {
    std::process::exit(loadcast::cli::run());
}
