fn main() {
    std::process::exit(affine_surject::cli::run(std::env::args_os()));
}
