fn main() {
    std::process::exit(basepose::cli::cli_main(std::env::args_os()));
}
