fn main() {
    std::process::exit(cwfnet::cli::main_with_args(std::env::args_os()));
}
