fn main() {
    std::process::exit(mubkit::cli::run());
}
