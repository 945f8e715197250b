// Isomorph-free enumeration of small intersecting uniform families.

use famlab::enumerate::{enumerate_families, EnumerationConstraints, TauFilter};
use famlab::Result;

/// Counts classes of intersecting k-families with at most `max_blocks`
/// blocks and tau at least `min_tau`.
pub fn run(k: usize, max_blocks: usize, min_tau: usize) -> Result<usize> {
    let c = EnumerationConstraints::new(k, max_blocks)
        .intersecting()
        .tau(TauFilter::at_least(min_tau));
    Ok(enumerate_families(&c)?.class_count)
}

fn main() -> Result<()> {
    let report = enumerate_families(&EnumerationConstraints::new(3, 6).intersecting())?;
    println!("intersecting 3-families, up to 6 blocks: {} classes", report.class_count);
    for (tau, n) in report.tau_histogram() {
        println!("  tau={tau}: {n}");
    }
    for class in report.classes.iter().filter(|c| c.tau == 3) {
        println!("  tau 3 at length {}: {}", class.length, class.family);
    }
    Ok(())
}
