fn main() -> std::process::ExitCode {
    yamabe_core::cli::main()
}
