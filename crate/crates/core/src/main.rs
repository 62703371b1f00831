fn main() {
    std::process::exit(seqsub::cli::main_with_args(std::env::args_os()));
}
