fn main() {
    if let Err(e) = ncvar_cli::configure_threads() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
    std::process::exit(ncvar_cli::run_from(std::env::args_os()));
}
