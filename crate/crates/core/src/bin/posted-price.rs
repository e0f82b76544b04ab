fn main() {
    std::process::exit(posted_price::cli::main_with_args(std::env::args_os()));
}
