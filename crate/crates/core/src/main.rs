fn main() {
    std::process::exit(warpbench::cli::run_from(std::env::args_os()));
}
