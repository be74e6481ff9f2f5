fn main() {
    std::process::exit(prunekit::cli::run());
}
