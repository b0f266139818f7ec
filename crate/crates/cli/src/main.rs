fn main() {
    std::process::exit(sveiqhr_cli::run(std::env::args_os()));
}
