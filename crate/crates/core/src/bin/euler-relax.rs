fn main() {
    std::process::exit(euler_relax::cli::run(std::env::args_os()));
}
