fn main() {
    std::process::exit(pvstab::cli::run(std::env::args_os()));
}
