fn main() {
    std::process::exit(leach_sim::cli::main_with_args(std::env::args_os()));
}
