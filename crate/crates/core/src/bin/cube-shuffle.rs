fn main() {
    std::process::exit(cube_shuffle::cli::run(std::env::args_os()));
}
