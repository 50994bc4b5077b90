fn main() {
    std::process::exit(charp::cli::main_with_args(std::env::args_os()));
}
