fn main() {
    std::process::exit(tchol_cli::run(std::env::args_os()));
}
