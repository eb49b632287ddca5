fn main() {
    std::process::exit(catvec::cli::main());
}
