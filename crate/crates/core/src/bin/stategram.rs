fn main() {
    let args: Vec<String> = std::env::args().collect();
    let (status, report) = stategram::cli::run_command(&args);
    print!("{report}");
    std::process::exit(status);
}
