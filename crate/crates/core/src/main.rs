fn main() {
    std::process::exit(svoltails::cli::run(std::env::args_os()));
}
