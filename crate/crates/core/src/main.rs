fn main() {
    qgrand_core::cli::main();
}
