fn main() {
    std::process::exit(genusmaps::cli::dispatch(std::env::args_os()));
}
