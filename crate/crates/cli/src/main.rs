use std::io::Write;
use std::path::PathBuf;

fn main() {
    let config_dir = std::env::var_os(ontic_report::app::CONFIG_DIR_ENV).map(PathBuf::from);
    let out = ontic_report::run(std::env::args_os(), config_dir.as_deref());
    // Ignore broken pipes; the exit code still reports the outcome.
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.exit_code);
}
