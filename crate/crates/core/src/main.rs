fn main() {
    std::process::exit(procbench::cli::cli_main(std::env::args_os()));
}
