fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(rltc::cli::main_with_args(std::env::args_os()))
}
