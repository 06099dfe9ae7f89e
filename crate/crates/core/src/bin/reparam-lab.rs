fn main() {
    std::process::exit(reparam_lab::cli::main_from_env());
}
