fn main() {
    std::process::exit(dlambda_fwm::cli::run(std::env::args_os()));
}
