use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use famlab::constructors::{
    build_degree3_family, build_mk, build_one_factorization, fano_plane, paper_example_family,
};
use famlab::enumerate::{
    default_q3_witness, enumerate_families, q4_case_search, verify_length4_claim,
    verify_mk_uniqueness, EnumerationConstraints,
};
use famlab::iso::is_isomorphic;
use famlab::solver::{degree_lower_bound, exact_tau, transversal_family};
use famlab::verify::{run_suite, Selection};
use famlab::workers::with_workers;
use famlab::SetFamily;
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Smallest number of vertices meeting every block, by trying every
/// vertex subset. Vertices must lie in 1..=n with n <= 20.
fn brute_tau(f: &SetFamily, n: u32) -> usize {
    let masks: Vec<u32> = f
        .blocks()
        .iter()
        .map(|b| b.vertices().iter().fold(0u32, |m, &v| m | 1 << (v - 1)))
        .collect();
    (0u32..1 << n)
        .filter(|s| masks.iter().all(|m| m & s != 0))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

/// Brute force over vertex subsets of increasing size, for families too big
/// for a bitmask scan.
fn brute_tau_by_size(f: &SetFamily) -> usize {
    let vs = f.vertex_set();
    (0..=vs.len())
        .find(|&t| vs.iter().copied().combinations(t).any(|c| f.is_covered_by(&c)))
        .unwrap()
}

fn degree_counts(f: &SetFamily) -> BTreeMap<u32, usize> {
    let mut d = BTreeMap::new();
    for b in f.block_lists() {
        for v in b {
            *d.entry(v).or_insert(0) += 1;
        }
    }
    d
}

fn mk_suite() -> Outcome {
    for k in 2..=12usize {
        let f = build_mk(k).map_err(|e| e.to_string())?;
        let blocks = f.block_lists();
        ensure(blocks.len() == k + 1, format!("k={k}: length {}", blocks.len()))?;
        ensure(blocks.iter().all(|b| b.len() == k), format!("k={k}: not uniform"))?;
        let d = degree_counts(&f);
        ensure(d.len() == k * (k + 1) / 2, format!("k={k}: {} vertices", d.len()))?;
        ensure(d.values().all(|&x| x == 2), format!("k={k}: degree other than 2"))?;
        for (a, b) in blocks.iter().tuple_combinations() {
            let common = a.iter().filter(|v| b.contains(v)).count();
            ensure(common == 1, format!("k={k}: intersection of size {common}"))?;
        }
        let r = exact_tau(&f).map_err(|e| e.to_string())?;
        ensure(r.tau == (k + 1).div_ceil(2), format!("k={k}: tau {}", r.tau))?;
        ensure(f.is_covered_by(&r.witness), format!("k={k}: witness misses a block"))?;
        if k <= 8 {
            ensure(brute_tau_by_size(&f) == r.tau, format!("k={k}: oracle disagrees"))?;
        }
    }
    Ok("k=2..12 structure and tau".into())
}

fn q4_upper() -> Outcome {
    let f = paper_example_family();
    ensure(f.len() == 9 && f.k() == 4, "shape")?;
    ensure(f.is_intersecting(), "not intersecting")?;
    let tau = exact_tau(&f).map_err(|e| e.to_string())?.tau;
    ensure(tau == 4, format!("tau {tau}"))?;
    ensure(brute_tau(&f.normalized(), 11) == 4, "oracle tau differs")?;
    let mk = build_mk(4).map_err(|e| e.to_string())?;
    ensure(is_isomorphic(&f.prefix(5), &mk), "first five blocks are not M_4")?;
    Ok("length 9, tau 4, prefix is M_4".into())
}

fn q4_case_analysis() -> Outcome {
    let l4 = verify_length4_claim().map_err(|e| e.to_string())?;
    ensure(l4.passed && l4.max_tau <= 2, format!("length-4 max tau {}", l4.max_tau))?;
    let u = verify_mk_uniqueness(4).map_err(|e| e.to_string())?;
    ensure(u.class_count == 1 && u.isomorphic_to_mk, format!("{} degree-2 classes", u.class_count))?;
    let cs = q4_case_search().map_err(|e| e.to_string())?;
    ensure(cs.passed, "case search failed")?;
    ensure(cs.max_tau <= 3, format!("candidate with tau {}", cs.max_tau))?;
    ensure(cs.candidates_examined == cs.candidates_expected, "not every candidate examined")?;
    Ok(format!(
        "{} length<=4 classes, {} covers, {} candidates all tau<=3",
        l4.class_count, cs.cover_count, cs.candidates_examined
    ))
}

fn q3_lower() -> Outcome {
    let report = enumerate_families(&EnumerationConstraints::new(3, 5).intersecting())
        .map_err(|e| e.to_string())?;
    for c in &report.classes {
        let t = brute_tau_by_size(&c.family);
        ensure(t == c.tau, format!("recorded tau {} but oracle {t}", c.tau))?;
        ensure(t < 3, format!("tau 3 at length {}", c.length))?;
    }
    let w = default_q3_witness();
    ensure(w.len() == 6 && w.is_intersecting(), "witness shape")?;
    let fano = fano_plane();
    ensure(
        w.block_lists().iter().all(|b| fano.block_lists().contains(b)),
        "witness is not inside the Fano plane",
    )?;
    ensure(brute_tau_by_size(&w) == 3, "witness tau is not 3")?;
    ensure(exact_tau(&w).map_err(|e| e.to_string())?.tau == 3, "solver tau is not 3")?;
    Ok(format!("{} classes of length<=5, none with tau 3", report.class_count))
}

fn disjoint_transversals() -> Outcome {
    for k in [3usize, 5, 7, 9, 11] {
        let mk = build_mk(k).map_err(|e| e.to_string())?;
        let ts = build_one_factorization(k).map_err(|e| e.to_string())?;
        ensure(ts.len() == k, format!("k={k}: {} transversals", ts.len()))?;
        let mut seen = Vec::new();
        for t in &ts {
            ensure(t.len() == k.div_ceil(2), format!("k={k}: size {}", t.len()))?;
            ensure(mk.is_covered_by(t.vertices()), format!("k={k}: not a cover"))?;
            seen.extend_from_slice(t.vertices());
        }
        seen.sort_unstable();
        let total = seen.len();
        seen.dedup();
        ensure(seen.len() == total, format!("k={k}: transversals overlap"))?;
        ensure(seen == mk.vertex_set(), format!("k={k}: not a partition"))?;
    }
    Ok("k=3,5,7,9,11".into())
}

fn transversal_of_transversals() -> Outcome {
    for k in [3usize, 5] {
        let mk = build_mk(k).map_err(|e| e.to_string())?;
        let tf = transversal_family(&mk).map_err(|e| e.to_string())?;
        let tau = exact_tau(&tf).map_err(|e| e.to_string())?.tau;
        ensure(tau == k, format!("k={k}: tau {tau}"))?;
        if k == 3 {
            ensure(brute_tau_by_size(&tf) == k, "oracle disagrees for k=3")?;
        }
    }
    Ok("k=3,5".into())
}

fn degree3_suite() -> Outcome {
    let f2 = build_degree3_family(2).map_err(|e| e.to_string())?;
    ensure(is_isomorphic(&f2, &fano_plane()), "m=2 is not the Fano plane")?;
    ensure(f2.len() == 7 && degree_counts(&f2).values().all(|&d| d == 3), "m=2 shape")?;
    ensure(brute_tau(&f2.normalized(), 7) == 3, "m=2 tau")?;
    let f3 = build_degree3_family(3).map_err(|e| e.to_string())?;
    ensure(f3.k() == 7 && f3.len() == 15, "m=3 shape")?;
    ensure(f3.is_intersecting(), "m=3 not intersecting")?;
    ensure(degree_counts(&f3).values().all(|&d| d == 3), "m=3 degrees")?;
    let bound = degree_lower_bound(&f3);
    ensure(bound >= 5, format!("degree bound {bound}"))?;
    let tau = exact_tau(&f3).map_err(|e| e.to_string())?.tau;
    ensure(tau >= 5, format!("exact tau {tau}"))?;
    Ok(format!("m=3: degree bound {bound}, exact tau {tau}"))
}

fn solver_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_d7a0);
    for i in 0..200 {
        let n: u32 = rng.gen_range(1..=14);
        let k = rng.gen_range(1..=n.min(6)) as usize;
        let want: usize = rng.gen_range(1..=8);
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        for _ in 0..200 {
            if blocks.len() == want {
                break;
            }
            let mut b: Vec<u32> = rand::seq::index::sample(&mut rng, n as usize, k)
                .into_iter()
                .map(|x| x as u32 + 1)
                .collect();
            b.sort_unstable();
            if !blocks.contains(&b) {
                blocks.push(b);
            }
        }
        let f = SetFamily::new(k, blocks).map_err(|e| e.to_string())?;
        let got = exact_tau(&f).map_err(|e| e.to_string())?.tau;
        let want = brute_tau(&f, n);
        ensure(got == want, format!("family {i} {f}: solver {got}, oracle {want}"))?;
    }
    Ok("200 seeded families".into())
}

fn naive_class_count(k: usize, b: usize, intersecting: bool) -> usize {
    let subsets: Vec<Vec<u32>> = (1..=7u32).combinations(k).collect();
    let mut reps: Vec<SetFamily> = Vec::new();
    for combo in subsets.iter().cloned().combinations(b) {
        let f = SetFamily::new(k, combo).unwrap();
        if intersecting && !f.is_intersecting() {
            continue;
        }
        if !reps.iter().any(|r| is_isomorphic(r, &f)) {
            reps.push(f);
        }
    }
    reps.len()
}

fn enumeration_oracle() -> Outcome {
    let mut checked = Vec::new();
    for k in 1..=3usize {
        for b in 1..=3usize {
            for intersecting in [false, true] {
                let mut c = EnumerationConstraints::exactly(k, b).max_vertices(7);
                if intersecting {
                    c = c.intersecting();
                }
                let got = enumerate_families(&c).map_err(|e| e.to_string())?.class_count;
                let want = naive_class_count(k, b, intersecting);
                ensure(
                    got == want,
                    format!("k={k} b={b} intersecting={intersecting}: {got} vs naive {want}"),
                )?;
                checked.push(got);
            }
        }
    }
    Ok(format!("class counts {checked:?}"))
}

fn strip_timings(s: &str) -> String {
    s.lines()
        .filter(|l| !l.trim_start().starts_with("\"elapsed_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("famlab-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.join(format!("report-{threads}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_famlab"))
            .args(["verify", "--suite", "all", "--report"])
            .arg(&path)
            .env("FAMLAB_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.code() == Some(0), format!("verify exited with {status}"))?;
        reports.push(std::fs::read_to_string(&path).map_err(|e| e.to_string())?);
    }
    ensure(
        strip_timings(&reports[0]) == strip_timings(&reports[1]),
        "reports differ between 1 and 4 threads",
    )?;
    let a = with_workers(Some(1), || run_suite(&Selection::All).without_timings().to_json());
    let b = with_workers(Some(3), || run_suite(&Selection::All).without_timings().to_json());
    ensure(a == b, "in-process reports differ between 1 and 3 workers")?;
    ensure(strip_timings(&a) == strip_timings(&reports[0]), "CLI and library reports differ")?;
    Ok(format!("{} bytes, identical", reports[0].len()))
}

// Written to the stderr handle directly so the lines survive output capture.
fn report(line: &str) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("M_k structure and tau, k=2..12", Duration::from_secs(5), mk_suite),
        ("q(4) <= 9 via the 9-block family", Duration::from_secs(1), q4_upper),
        ("q(4) > 8 case analysis", Duration::from_secs(600), q4_case_analysis),
        ("q(3) = 6", Duration::from_secs(600), q3_lower),
        ("disjoint transversals of M_k", Duration::from_secs(1), disjoint_transversals),
        ("transversals of M_k have tau k", Duration::from_secs(30), transversal_of_transversals),
        ("degree-3 families", Duration::from_secs(60), degree3_suite),
        ("solver matches brute force", Duration::from_secs(60), solver_oracle),
        ("enumeration matches naive grouping", Duration::from_secs(60), enumeration_oracle),
        ("verify reports are deterministic", Duration::from_secs(600), determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > *budget => Err(format!("took {elapsed:?}, budget {budget:?}")),
            other => other,
        };
        match &outcome {
            Ok(detail) => report(&format!("criterion {:>2} PASS {name}: {detail} ({} ms)", i + 1, elapsed.as_millis())),
            Err(why) => {
                report(&format!("criterion {:>2} FAIL {name}: {why} ({} ms)", i + 1, elapsed.as_millis()));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
