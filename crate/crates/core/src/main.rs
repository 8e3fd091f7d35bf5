fn main() {
    std::process::exit(collab_hub::cli::run(std::env::args_os()));
}
