fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONIC_CDS_LOG", "warn")).init();
    std::process::exit(conic_cds::cli::run_cli(std::env::args_os()));
}
