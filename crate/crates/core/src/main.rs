fn main() {
    std::process::exit(tpt_engine::cli::run(std::env::args_os()));
}
