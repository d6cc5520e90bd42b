fn main() {
    std::process::exit(nvdnp::cli::main_with_args(std::env::args_os()));
}
