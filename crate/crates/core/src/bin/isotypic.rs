fn main() {
    std::process::exit(isotypic::cli::main());
}
