fn main() {
    std::process::exit(hullsolve_cli::run(std::env::args_os()));
}
