fn main() {
    std::process::exit(hcs_core::cli::run(std::env::args_os()));
}
