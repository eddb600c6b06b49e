fn main() {
    std::process::exit(bpes_core::cli::run());
}
