fn main() {
    std::process::exit(regdec::cli::main_with(std::env::args_os()));
}
