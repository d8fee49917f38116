fn main() {
    std::process::exit(invexkit::cli::run(std::env::args_os()));
}
