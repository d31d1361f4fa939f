fn main() {
    std::process::exit(subfpt_cli::run(std::env::args_os()));
}
