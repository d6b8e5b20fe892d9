fn main() {
    std::process::exit(microgrid_core::cli::main_with_args(std::env::args_os()));
}
