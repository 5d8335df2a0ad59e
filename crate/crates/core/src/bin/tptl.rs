fn main() -> std::process::ExitCode {
    tptl::cli::main()
}
