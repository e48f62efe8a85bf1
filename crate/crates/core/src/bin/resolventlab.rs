fn main() {
    std::process::exit(resolventlab::cli::main_entry());
}
