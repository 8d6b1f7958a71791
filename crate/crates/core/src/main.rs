fn main() {
    std::process::exit(lie2core::cli::run(std::env::args_os()));
}
