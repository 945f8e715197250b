// For odd k, splits the vertices of M_k into k disjoint minimum transversals.

use famlab::constructors::{build_mk, build_one_factorization};
use famlab::Result;

pub fn run(k: usize) -> Result<Vec<Vec<u32>>> {
    Ok(build_one_factorization(k)?
        .iter()
        .map(|t| t.vertices().to_vec())
        .collect())
}

fn main() -> Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let mk = build_mk(k)?;
    for (i, t) in run(k)?.iter().enumerate() {
        println!("T{}: {:?} covers={}", i + 1, t, mk.is_covered_by(t));
    }
    Ok(())
}
