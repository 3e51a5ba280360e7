fn main() {
    std::process::exit(liecodazzi::cli::run(std::env::args_os()));
}
