fn main() {
    std::process::exit(cmtors_cli::try_main(std::env::args_os()));
}
