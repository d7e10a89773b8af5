fn main() {
    std::process::exit(liftrate::cli::main());
}
