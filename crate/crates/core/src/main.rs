fn main() {
    std::process::exit(elephant_fit::cli::run(std::env::args_os()));
}
