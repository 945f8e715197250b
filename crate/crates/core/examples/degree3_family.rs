// The intersecting degree-3 families for k = 2^m - 1.

use famlab::constructors::build_degree3_family;
use famlab::solver::{degree_lower_bound, exact_tau};
use famlab::Result;

/// Returns `(k, length, degree bound, exact tau)`.
pub fn run(m: u32) -> Result<(usize, usize, usize, usize)> {
    let f = build_degree3_family(m)?;
    let tau = exact_tau(&f)?.tau;
    Ok((f.k(), f.len(), degree_lower_bound(&f), tau))
}

fn main() -> Result<()> {
    for m in 2..=3 {
        let (k, len, bound, tau) = run(m)?;
        println!("m={m} k={k} length={len} bound={bound} tau={tau}");
    }
    Ok(())
}
