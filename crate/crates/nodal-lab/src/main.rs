fn main() {
    std::process::exit(nodal_lab::cli_main());
}
