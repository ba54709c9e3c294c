fn main() {
    std::process::exit(gibbs_lab_cli::run(std::env::args_os()));
}
