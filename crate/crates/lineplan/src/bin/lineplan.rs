fn main() {
    std::process::exit(lineplan::cli::run());
}
