fn main() {
    std::process::exit(gsgf::cli_io::main_run(std::env::args_os()));
}
