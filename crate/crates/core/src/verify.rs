//! The claim suite: every finite statement about `M_k`, its transversals,
//! the degree-3 families and the values `q(3) = 6`, `q(4) = 9`, checked
//! with exact integer comparisons and collected into one report.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructors::{
    build_degree3_family, build_mk, build_one_factorization, fano_plane, paper_example_family,
};
use crate::enumerate::{
    enumerate_families, q4_case_search, verify_length4_claim, verify_mk_uniqueness,
    verify_q3_lower_bound, EnumerationConstraints, TauFilter,
};
use crate::error::{Error, Result};
use crate::family::Vertex;
use crate::iso::is_isomorphic;
use crate::solver::{degree_lower_bound, enumerate_min_transversals, exact_tau, transversal_family};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimRecord {
    pub id: String,
    pub anchor: String,
    pub params: Value,
    pub verdict: Verdict,
    pub measured: Value,
    pub expected: Value,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
}

/// A numbered statement and the claims that check it.
#[derive(Debug, Clone, Serialize)]
pub struct CompletenessRow {
    pub statement: &'static str,
    pub claims: Vec<&'static str>,
    pub covered: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub claims: Vec<ClaimRecord>,
    pub summary: Summary,
    pub completeness: Vec<CompletenessRow>,
}

impl SuiteReport {
    /// Same report with every `elapsed_ms` zeroed, for byte comparisons.
    pub fn without_timings(mut self) -> SuiteReport {
        for c in &mut self.claims {
            c.elapsed_ms = 0;
        }
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0 && self.summary.error == 0
    }
}

/// Claim ids in execution order.
pub const CLAIM_IDS: [&str; 12] = [
    "L1-structure",
    "L1-tau",
    "C2-uniqueness",
    "C3-characterization",
    "L4-dichotomy",
    "L7-disjoint",
    "R-transversal-of-transversals",
    "T8-degree3",
    "T5-upper",
    "T5-length4",
    "T5-case-search",
    "C6-lower",
];

const COMPLETENESS: [(&str, &[&str]); 10] = [
    ("M_k: length k+1, k(k+1)/2 vertices, degree 2, tau = ceil((k+1)/2)", &["L1-structure", "L1-tau"]),
    ("M_k is unique up to relabeling among degree-2 families of its length and tau", &["C2-uniqueness"]),
    ("degree 2 with one-point pairwise intersections forces M_k", &["C3-characterization"]),
    ("a minimal intersecting k-family with tau = k has a degree-3 vertex or is M_2", &["L4-dichotomy", "T5-length4"]),
    ("q(4) = 9", &["T5-upper", "T5-length4", "C2-uniqueness", "T5-case-search"]),
    ("q(3) = 6", &["C6-lower"]),
    ("M_k has k disjoint transversals for odd k", &["L7-disjoint"]),
    ("the minimum transversals of M_k form a family with tau = k", &["R-transversal-of-transversals"]),
    ("k = 2^m - 1: intersecting k-family of length 2k+1, all degrees 3, tau >= (2k+1)/3", &["T8-degree3"]),
    ("explicit intersecting 4-family of length 9 with tau 4 whose first five blocks form M_4", &["T5-upper"]),
];

/// Which claims to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    All,
    Ids(Vec<String>),
}

impl Selection {
    /// Parses `all` or a comma-separated id list. Unknown ids are errors.
    pub fn parse(s: &str) -> Result<Selection> {
        if s.trim() == "all" {
            return Ok(Selection::All);
        }
        let ids: Vec<String> = s
            .split(',')
            .map(|x| x.trim().to_string())
            .filter(|x| !x.is_empty())
            .collect();
        if ids.is_empty() {
            return Err(Error::InvalidParameter("empty claim selection".into()));
        }
        for id in &ids {
            if !CLAIM_IDS.contains(&id.as_str()) {
                return Err(Error::InvalidParameter(format!("unknown claim id {id:?}")));
            }
        }
        Ok(Selection::Ids(ids))
    }

    fn includes(&self, id: &str) -> bool {
        match self {
            Selection::All => true,
            Selection::Ids(ids) => ids.iter().any(|x| x == id),
        }
    }
}

struct Outcome {
    pass: bool,
    measured: Value,
    expected: Value,
}

type Check = fn(u64) -> Result<Outcome>;

struct Job {
    id: &'static str,
    anchor: &'static str,
    param_name: Option<&'static str>,
    param: u64,
    check: Check,
}

fn jobs() -> Vec<Job> {
    let mut out = Vec::new();
    let mut add = |id, anchor, param_name, params: &[u64], check: Check| {
        for &p in params {
            out.push(Job {
                id,
                anchor,
                param_name,
                param: p,
                check,
            });
        }
    };
    let mk_range: Vec<u64> = (2..=12).collect();
    add("L1-structure", "M_k has k+1 blocks on k(k+1)/2 vertices, all of degree 2, meeting pairwise in one vertex", Some("k"), &mk_range, l1_structure);
    add("L1-tau", "M_k has transversal number ceil((k+1)/2)", Some("k"), &mk_range, l1_tau);
    add("C2-uniqueness", "intersecting k-families of length k+1 with all degrees 2 and tau ceil((k+1)/2) form one class, that of M_k", Some("k"), &[3, 4], c2_uniqueness);
    add("C3-characterization", "an intersecting k-family with all degrees 2 and one-point pairwise intersections is M_k", Some("k"), &[2, 3, 4], c3_characterization);
    add("L4-dichotomy", "the shortest intersecting k-families with tau = k have a vertex of degree at least 3 or are M_2", Some("k"), &[2, 3], l4_dichotomy);
    add("L7-disjoint", "for odd k, M_k has k pairwise disjoint transversals", Some("k"), &[3, 5, 7, 9, 11], l7_disjoint);
    add("R-transversal-of-transversals", "the minimum transversals of M_k form a family with transversal number k", Some("k"), &[3, 5], r_transversals);
    add("T8-degree3", "for k = 2^m - 1 there is an intersecting k-family of length 2k+1 with all degrees 3, so tau >= (2k+1)/3", Some("m"), &[2, 3], t8_degree3);
    add("T5-upper", "an explicit intersecting 4-family of length 9 has tau 4 and starts with M_4, so q(4) <= 9", None, &[0], t5_upper);
    add("T5-length4", "every intersecting 4-family of length at most 4 has tau at most 2", None, &[0], t5_length4);
    add("T5-case-search", "M_4 plus three blocks through a new vertex, each completing a 3-cover, always has tau at most 3, so q(4) > 8", None, &[0], t5_case_search);
    add("C6-lower", "no intersecting 3-family of length at most 5 has tau 3, while one of length 6 does, so q(3) = 6", None, &[0], c6_lower);
    out
}

fn pass_if(measured: Value, expected: Value) -> Outcome {
    Outcome {
        pass: measured == expected,
        measured,
        expected,
    }
}

fn l1_structure(k: u64) -> Result<Outcome> {
    let k = k as usize;
    let f = build_mk(k)?;
    let mut sizes = f.intersection_multiset();
    sizes.dedup();
    let n = k * (k + 1) / 2;
    Ok(pass_if(
        json!({
            "length": f.len(),
            "vertices": f.vertex_count(),
            "degree_histogram": f.degrees().histogram(),
            "pairwise_intersection_sizes": sizes,
            "intersecting": f.is_intersecting(),
        }),
        json!({
            "length": k + 1,
            "vertices": n,
            "degree_histogram": {"2": n},
            "pairwise_intersection_sizes": [1],
            "intersecting": true,
        }),
    ))
}

fn l1_tau(k: u64) -> Result<Outcome> {
    let k = k as usize;
    let f = build_mk(k)?;
    let r = exact_tau(&f)?;
    Ok(Outcome {
        pass: r.tau == (k + 1).div_ceil(2) && f.is_covered_by(&r.witness),
        measured: json!({
            "tau": r.tau,
            "witness": r.witness,
            "degree_lower_bound": r.degree_lower_bound,
            "search_nodes": r.search_nodes,
        }),
        expected: json!({ "tau": (k + 1).div_ceil(2) }),
    })
}

fn c2_uniqueness(k: u64) -> Result<Outcome> {
    let v = verify_mk_uniqueness(k as usize)?;
    Ok(pass_if(
        json!({
            "class_count": v.class_count,
            "isomorphic_to_mk": v.isomorphic_to_mk,
            "pairwise_intersections_all_one": v.pairwise_intersections_all_one,
        }),
        json!({
            "class_count": 1,
            "isomorphic_to_mk": true,
            "pairwise_intersections_all_one": true,
        }),
    ))
}

fn c3_characterization(k: u64) -> Result<Outcome> {
    let k = k as usize;
    // lengths beyond k+1 are searched too: the length is forced, not assumed
    let c = EnumerationConstraints::new(k, k + 2)
        .intersecting()
        .pairwise(1)
        .degrees(Some(2), Some(2));
    let report = enumerate_families(&c)?;
    let mk = build_mk(k)?;
    let lengths: Vec<usize> = report.classes.iter().map(|c| c.length).collect();
    let iso = report.class_count == 1 && is_isomorphic(&report.classes[0].family, &mk);
    Ok(pass_if(
        json!({
            "class_count": report.class_count,
            "lengths": lengths,
            "isomorphic_to_mk": iso,
        }),
        json!({
            "class_count": 1,
            "lengths": [k + 1],
            "isomorphic_to_mk": true,
        }),
    ))
}

fn l4_dichotomy(k: u64) -> Result<Outcome> {
    let k = k as usize;
    let expected_min_length = match k {
        2 => 3,
        3 => 6,
        _ => return Err(Error::InvalidParameter(format!("dichotomy check covers k = 2, 3; got {k}"))),
    };
    let report = enumerate_families(
        &EnumerationConstraints::new(k, expected_min_length)
            .intersecting()
            .tau(TauFilter::exactly(k)),
    )?;
    let min_length = report.classes.iter().map(|c| c.length).min();
    let minimal: Vec<_> = report
        .classes
        .iter()
        .filter(|c| Some(c.length) == min_length)
        .collect();
    let m2 = build_mk(2)?;
    let holds = minimal
        .iter()
        .all(|c| c.family.max_degree() >= 3 || is_isomorphic(&c.family, &m2));
    let max_degrees: Vec<usize> = minimal.iter().map(|c| c.family.max_degree()).collect();
    Ok(Outcome {
        pass: min_length == Some(expected_min_length) && holds && !minimal.is_empty(),
        measured: json!({
            "min_length_with_tau_k": min_length,
            "classes_at_min_length": minimal.len(),
            "max_degrees": max_degrees,
            "dichotomy_holds": holds,
        }),
        expected: json!({
            "min_length_with_tau_k": expected_min_length,
            "dichotomy_holds": true,
        }),
    })
}

fn l7_disjoint(k: u64) -> Result<Outcome> {
    let k = k as usize;
    let ts = build_one_factorization(k)?;
    let mk = build_mk(k)?;
    let sizes_ok = ts.iter().all(|t| t.len() == k.div_ceil(2));
    let disjoint = ts
        .iter()
        .enumerate()
        .all(|(i, a)| ts[i + 1..].iter().all(|b| a.is_disjoint_from(b)));
    let covers = ts.iter().all(|t| mk.is_covered_by(t.vertices()));
    let mut union: Vec<Vertex> = ts.iter().flat_map(|t| t.vertices().iter().copied()).collect();
    union.sort_unstable();
    let partition = union == mk.vertex_set();
    let min_tau = exact_tau(&mk)?.tau;
    Ok(pass_if(
        json!({
            "count": ts.len(),
            "all_of_size_tau": sizes_ok && min_tau == k.div_ceil(2),
            "pairwise_disjoint": disjoint,
            "each_covers_mk": covers,
            "partition_vertex_set": partition,
        }),
        json!({
            "count": k,
            "all_of_size_tau": true,
            "pairwise_disjoint": true,
            "each_covers_mk": true,
            "partition_vertex_set": true,
        }),
    ))
}

fn r_transversals(k: u64) -> Result<Outcome> {
    let k = k as usize;
    let mk = build_mk(k)?;
    let all = transversal_family(&mk)?;
    let all_tau = exact_tau(&all)?.tau;
    let count = enumerate_min_transversals(&mk)?.len();
    // the other reading: only the k disjoint transversals
    let disjoint = crate::family::SetFamily::new(
        k.div_ceil(2),
        build_one_factorization(k)?
            .iter()
            .map(|t| t.vertices().to_vec())
            .collect(),
    )?;
    let disjoint_tau = exact_tau(&disjoint)?.tau;
    Ok(pass_if(
        json!({
            "min_transversal_count": count,
            "tau_of_all_min_transversals": all_tau,
            "tau_of_disjoint_transversals": disjoint_tau,
        }),
        json!({
            "min_transversal_count": count,
            "tau_of_all_min_transversals": k,
            "tau_of_disjoint_transversals": k,
        }),
    ))
}

fn t8_degree3(m: u64) -> Result<Outcome> {
    let f = build_degree3_family(m as u32)?;
    let k = (1usize << m) - 1;
    let r = exact_tau(&f)?;
    let bound = (2 * k + 1).div_ceil(3);
    let fano = if m == 2 {
        Some(is_isomorphic(&f, &fano_plane()))
    } else {
        None
    };
    let measured = json!({
        "k": f.k(),
        "length": f.len(),
        "vertices": f.vertex_count(),
        "intersecting": f.is_intersecting(),
        "degree_histogram": f.degrees().histogram(),
        "degree_lower_bound": degree_lower_bound(&f),
        "tau": r.tau,
        "is_fano_plane": fano,
    });
    let pass = f.k() == k
        && f.len() == 2 * k + 1
        && f.is_intersecting()
        && f.degrees().all_equal_to(3)
        && degree_lower_bound(&f) >= bound
        && r.tau >= bound
        && fano.unwrap_or(true)
        && (m != 2 || r.tau == 3);
    Ok(Outcome {
        pass,
        measured,
        expected: json!({
            "k": k,
            "length": 2 * k + 1,
            "intersecting": true,
            "all_degrees": 3,
            "tau_at_least": bound,
        }),
    })
}

fn t5_upper(_: u64) -> Result<Outcome> {
    let f = paper_example_family();
    let r = exact_tau(&f)?;
    Ok(pass_if(
        json!({
            "k": f.k(),
            "length": f.len(),
            "vertices": f.vertex_count(),
            "intersecting": f.is_intersecting(),
            "tau": r.tau,
            "first_five_isomorphic_to_m4": is_isomorphic(&f.prefix(5), &build_mk(4)?),
        }),
        json!({
            "k": 4,
            "length": 9,
            "vertices": 11,
            "intersecting": true,
            "tau": 4,
            "first_five_isomorphic_to_m4": true,
        }),
    ))
}

fn t5_length4(_: u64) -> Result<Outcome> {
    let v = verify_length4_claim()?;
    Ok(Outcome {
        pass: v.passed,
        measured: serde_json::to_value(&v).expect("serializable"),
        expected: json!({ "max_tau_at_most": 2 }),
    })
}

fn t5_case_search(_: u64) -> Result<Outcome> {
    let v = q4_case_search()?;
    Ok(Outcome {
        pass: v.passed,
        measured: serde_json::to_value(&v).expect("serializable"),
        expected: json!({
            "max_tau_at_most": 3,
            "candidates_examined": v.candidates_expected,
            "fresh_triples_covering": 0,
            "pair_counting": {"total_pairs": 55, "occurring_bound": 48, "min_unused_at_least": 7},
        }),
    })
}

fn c6_lower(_: u64) -> Result<Outcome> {
    let v = verify_q3_lower_bound(None)?;
    Ok(Outcome {
        pass: v.passed,
        measured: serde_json::to_value(&v).expect("serializable"),
        expected: json!({
            "classes_with_tau3": 0,
            "witness_length": 6,
            "witness_tau": 3,
        }),
    })
}

/// Runs the selected claims (concurrently; report order is fixed).
/// Failures and errors are recorded, never propagated.
pub fn run_suite(selection: &Selection) -> SuiteReport {
    let selected: Vec<Job> = jobs().into_iter().filter(|j| selection.includes(j.id)).collect();
    let claims: Vec<ClaimRecord> = selected
        .par_iter()
        .map(|job| {
            let start = Instant::now();
            let outcome = (job.check)(job.param);
            let elapsed_ms = start.elapsed().as_millis() as u64;
            let params = match job.param_name {
                Some(name) => json!({ name: job.param }),
                None => json!({}),
            };
            let (verdict, measured, expected) = match outcome {
                Ok(o) => (
                    if o.pass { Verdict::Pass } else { Verdict::Fail },
                    o.measured,
                    o.expected,
                ),
                Err(e) => (Verdict::Error, json!({ "error": e.to_string() }), Value::Null),
            };
            ClaimRecord {
                id: job.id.to_string(),
                anchor: job.anchor.to_string(),
                params,
                verdict,
                measured,
                expected,
                elapsed_ms,
            }
        })
        .collect();

    let mut summary = Summary::default();
    for c in &claims {
        match c.verdict {
            Verdict::Pass => summary.pass += 1,
            Verdict::Fail => summary.fail += 1,
            Verdict::Error => summary.error += 1,
        }
    }
    let completeness = COMPLETENESS
        .iter()
        .map(|(statement, ids)| CompletenessRow {
            statement,
            claims: ids.to_vec(),
            covered: ids.iter().all(|id| CLAIM_IDS.contains(id)),
        })
        .collect();
    SuiteReport {
        claims,
        summary,
        completeness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parsing() {
        assert_eq!(Selection::parse("all").unwrap(), Selection::All);
        assert_eq!(
            Selection::parse("T5-upper, L1-tau").unwrap(),
            Selection::Ids(vec!["T5-upper".into(), "L1-tau".into()])
        );
        assert!(Selection::parse("nonexistent-id").is_err());
        assert!(Selection::parse("").is_err());
    }

    #[test]
    fn every_claim_id_has_jobs_and_completeness_is_total() {
        let js = jobs();
        for id in CLAIM_IDS {
            assert!(js.iter().any(|j| j.id == id), "{id}");
        }
        let listed: Vec<&str> = COMPLETENESS.iter().flat_map(|(_, ids)| ids.iter().copied()).collect();
        for id in CLAIM_IDS {
            assert!(listed.contains(&id), "{id} missing from the completeness table");
        }
    }

    #[test]
    fn upper_bound_claim() {
        let r = run_suite(&Selection::parse("T5-upper").unwrap());
        assert_eq!(r.claims.len(), 1);
        assert_eq!(r.claims[0].verdict, Verdict::Pass);
        assert_eq!(r.claims[0].measured["tau"], 4);
    }

    #[test]
    fn l1_tau_k6() {
        let o = l1_tau(6).unwrap();
        assert!(o.pass);
        assert_eq!(o.measured["tau"], 4);
    }

    #[test]
    fn transversal_of_transversals_k5() {
        let o = r_transversals(5).unwrap();
        assert!(o.pass);
        assert_eq!(o.measured["tau_of_all_min_transversals"], 5);
        assert_eq!(o.measured["min_transversal_count"], 15);
    }
}
