fn main() {
    std::process::exit(ddin::cli::run(std::env::args_os()));
}
