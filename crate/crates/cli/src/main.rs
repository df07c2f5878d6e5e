fn main() {
    std::process::exit(llab_cli::main_entry());
}
