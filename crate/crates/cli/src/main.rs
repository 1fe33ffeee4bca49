fn main() {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).parse_default_env().init();
    let code = greedfear_cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
