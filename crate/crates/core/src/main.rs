fn main() {
    std::process::exit(polybergman::cli::run());
}
