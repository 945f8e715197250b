// Builds M_k for a few k and prints its shape and transversal number.
//
// Run with `cargo run --example build_mk -- 6`.

use famlab::constructors::build_mk;
use famlab::format::to_fam;
use famlab::solver::exact_tau;
use famlab::Result;

/// Returns `(length, vertices, tau)` for M_k.
pub fn run(k: usize) -> Result<(usize, usize, usize)> {
    let mk = build_mk(k)?;
    let tau = exact_tau(&mk)?.tau;
    Ok((mk.len(), mk.vertex_count(), tau))
}

fn main() -> Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    print!("{}", to_fam(&build_mk(k)?));
    let (len, n, tau) = run(k)?;
    println!("length={len} vertices={n} tau={tau}");
    Ok(())
}
