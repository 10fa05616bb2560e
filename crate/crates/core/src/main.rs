fn main() {
    std::process::exit(quantsem::cli::run(std::env::args_os()));
}
