// Canonical forms and isomorphism tests.

use famlab::constructors::{build_mk, paper_example_family};
use famlab::iso::{canonical_form, isomorphism};
use famlab::Result;

/// Relabels M_k by reversing its vertex ids and recovers the map back.
pub fn run(k: usize) -> Result<bool> {
    let mk = build_mk(k)?;
    let n = mk.vertex_count() as u32;
    let shuffled = mk.relabel(|v| n + 1 - v);
    let same_form = canonical_form(&mk) == canonical_form(&shuffled);
    let map = isomorphism(&shuffled, &mk);
    Ok(same_form && map.is_some())
}

fn main() -> Result<()> {
    println!("M_5 vs relabeled copy: {}", run(5)?);
    let head = paper_example_family().prefix(5);
    match isomorphism(&head, &build_mk(4)?) {
        Some(map) => println!("first five example blocks are M_4 via {map:?}"),
        None => println!("first five example blocks are not M_4"),
    }
    Ok(())
}
