// Exact transversal number, a witness, and all minimum transversals of a
// family read from a `.fam` or `.json` file (default: the 9-block example).

use std::path::Path;

use famlab::constructors::paper_example_family;
use famlab::format::read_family;
use famlab::solver::{enumerate_min_transversals, exact_tau};
use famlab::{Result, SetFamily};

/// Returns `(tau, witness, number of minimum transversals)`.
pub fn run(f: &SetFamily) -> Result<(usize, Vec<u32>, usize)> {
    let r = exact_tau(f)?;
    let all = enumerate_min_transversals(f)?;
    Ok((r.tau, r.witness, all.len()))
}

fn main() -> Result<()> {
    let f = match std::env::args().nth(1) {
        Some(p) => read_family(Path::new(&p), None)?,
        None => paper_example_family(),
    };
    let (tau, witness, count) = run(&f)?;
    println!("tau={tau} witness={witness:?} minimum_transversals={count}");
    Ok(())
}
