fn main() {
    std::process::exit(hedgelab::cli::cli_main(std::env::args_os()));
}
