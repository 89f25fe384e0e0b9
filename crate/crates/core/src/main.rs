fn main() {
    std::process::exit(act_core::cli::run(std::env::args_os()));
}
