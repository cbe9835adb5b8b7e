//! Execute a TOML run configuration and print the text summary. Pass a
//! path to run another file.
use isotypic::cli::{render_text, run, RunConfig};

fn main() -> isotypic::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => RunConfig::load(path.as_ref())?,
        None => RunConfig::from_toml(include_str!("configs/reflection.toml"))?,
    };
    let report = run(&cfg)?;
    print!("{}", render_text(&report));
    std::process::exit(report.status.exit_code());
}
