fn main() {
    std::process::exit(tilerec::cli::run(std::env::args_os()));
}
