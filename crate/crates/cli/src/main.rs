fn main() {
    std::process::exit(tss_cli::run(std::env::args_os()));
}
