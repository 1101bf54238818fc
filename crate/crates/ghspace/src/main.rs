use clap::Parser;

mod cli;

fn main() {
    // die quietly when the output pipe closes (e.g. piping into `head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let parsed = cli::Cli::parse();
    if let Err(failure) = cli::run(parsed) {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}
