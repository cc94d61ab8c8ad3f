fn main() {
    std::process::exit(chernpos_cli::run(std::env::args()));
}
