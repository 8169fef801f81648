fn main() {
    std::process::exit(hybrid_cv::cli::run(std::env::args_os()));
}
