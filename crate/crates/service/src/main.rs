fn main() {
    std::process::exit(vidtriage_service::cli::main_with(std::env::args_os()));
}
