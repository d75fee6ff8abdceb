fn main() {
    std::process::exit(workbench::cli::run(std::env::args_os()));
}
