fn main() {
    std::process::exit(hyplab::cli::main());
}
