fn main() {
    std::process::exit(staircase_kvol::cli::main_with_env());
}
