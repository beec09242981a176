fn main() {
    std::process::exit(expdist::cli::run());
}
