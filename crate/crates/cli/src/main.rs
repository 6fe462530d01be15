fn main() {
    std::process::exit(sosgibbs_cli::run(std::env::args_os()));
}
