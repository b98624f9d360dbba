fn main() -> std::process::ExitCode {
    hgntr::cli::main_entry()
}
