fn main() {
    std::process::exit(sphere_dpp::cli::main_with_args(std::env::args_os()));
}
