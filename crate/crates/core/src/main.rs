fn main() {
    std::process::exit(geocycle::cli::main_with(std::env::args_os()));
}
