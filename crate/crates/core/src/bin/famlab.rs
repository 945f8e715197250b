fn main() {
    std::process::exit(famlab::cli::run(std::env::args_os()));
}
