// Runs the claim suite and prints the JSON report.
//
// `cargo run --release --example verify_suite -- T5-upper,C6-lower`

use famlab::verify::{run_suite, Selection, SuiteReport};
use famlab::Result;

pub fn run(selection: &str) -> Result<SuiteReport> {
    Ok(run_suite(&Selection::parse(selection)?))
}

fn main() -> Result<()> {
    let sel = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    let report = run(&sel)?;
    print!("{}", report.to_json());
    if !report.all_passed() {
        std::process::exit(1);
    }
    Ok(())
}
