fn main() {
    std::process::exit(eavesdrop_cli::main_with_args(std::env::args_os()));
}
