fn main() {
    std::process::exit(curvestat::cli::run(std::env::args_os()));
}
