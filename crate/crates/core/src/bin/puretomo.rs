fn main() {
    std::process::exit(puretomo::cli::cli_main(std::env::args_os()));
}
