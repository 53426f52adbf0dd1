fn main() {
    std::process::exit(apmoments::cli::run(std::env::args_os()));
}
