// Exhaustive check that M_4 plus three blocks through one new vertex never
// reaches tau 4.

use famlab::enumerate::{q4_case_search, CaseSearchVerdict};
use famlab::Result;

pub fn run() -> Result<CaseSearchVerdict> {
    q4_case_search()
}

fn main() -> Result<()> {
    let v = run()?;
    println!("3-covers of M_4: {}", v.cover_count);
    println!("candidates: {} examined, {} expected", v.candidates_examined, v.candidates_expected);
    println!("tau histogram: {:?}", v.tau_histogram);
    println!(
        "pairs: {} total, at most {} occurring, {} observed at most",
        v.pair_counting.total_pairs, v.pair_counting.occurring_bound, v.pair_counting.max_occurring
    );
    println!("passed={}", v.passed);
    Ok(())
}
