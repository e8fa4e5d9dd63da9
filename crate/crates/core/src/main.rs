fn main() {
    std::process::exit(hyptrace::cli::run(std::env::args_os()));
}
