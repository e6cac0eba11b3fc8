fn main() {
    if let Err(e) = stm_cli::run(std::env::args().collect()) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
