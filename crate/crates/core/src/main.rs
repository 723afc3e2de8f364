fn main() {
    std::process::exit(wetwit::cli::run(std::env::args_os()));
}
