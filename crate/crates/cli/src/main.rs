fn main() {
    std::process::exit(odenet_cli::run(std::env::args_os()));
}
