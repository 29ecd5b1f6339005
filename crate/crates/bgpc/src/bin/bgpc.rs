fn main() {
    std::process::exit(bgpc::cli::run());
}
