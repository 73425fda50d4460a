fn main() {
    std::process::exit(scar_thermo::cli::run(std::env::args_os()));
}
