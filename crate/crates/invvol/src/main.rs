fn main() {
    env_logger::init();
    std::process::exit(invvol::cli::run(std::env::args_os()));
}
