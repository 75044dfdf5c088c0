fn main() {
    std::process::exit(hgbench::cli::run(std::env::args_os()));
}
