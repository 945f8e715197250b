//! Command-line front end.
//!
//! Exit codes: 0 success, 1 negative answer or failed claim, 2 invalid
//! input, 3 node budget exceeded (or a claim that errored).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::constructors::{
    build_degree3_family, build_mk, build_one_factorization, paper_example_family,
};
use crate::enumerate::{enumerate_families, EnumerationConstraints, TauFilter};
use crate::error::Error;
use crate::family::SetFamily;
use crate::format::{read_family, render, write_family, Format};
use crate::iso::isomorphism;
use crate::solver::{enumerate_min_transversals, exact_tau_with, SolverOptions};
use crate::verify::{run_suite, Selection};
use crate::workers::{threads_from_env, with_workers};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "famlab", version, about = "Transversals of intersecting uniform set families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one of the standard families.
    Construct(ConstructArgs),
    /// Exact transversal number of a family file.
    Tau(TauArgs),
    /// Decide whether two family files are isomorphic.
    Iso(IsoArgs),
    /// Run the claim suite.
    Verify(VerifyArgs),
    /// Enumerate families up to isomorphism.
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    /// M_k (needs --k).
    Mk,
    /// The k disjoint transversals of M_k, odd k (needs --k).
    Factorization,
    /// Degree-3 family for k = 2^m - 1 (needs --m).
    Degree3,
    /// The 9-block 4-uniform family with tau 4.
    Example,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Fam,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Fam => Format::Fam,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    pub which: Construction,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<u32>,
    /// Output file; the family goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (default: from the extension, else fam).
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    pub path: PathBuf,
    /// Also list every minimum transversal.
    #[arg(long)]
    pub enumerate: bool,
    #[arg(long)]
    pub node_budget: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct IsoArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `all` or a comma-separated list of claim ids.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Zero all timings in the report.
    #[arg(long)]
    pub no_timings: bool,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub k: usize,
    /// Largest family length searched.
    #[arg(long, conflicts_with = "blocks")]
    pub max_blocks: Option<usize>,
    /// Search this exact length only.
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub intersecting: bool,
    #[arg(long)]
    pub max_vertices: Option<usize>,
    #[arg(long)]
    pub min_degree: Option<usize>,
    #[arg(long)]
    pub max_degree: Option<usize>,
    /// Require every two blocks to meet in exactly this many vertices.
    #[arg(long)]
    pub pairwise: Option<usize>,
    #[arg(long)]
    pub min_tau: Option<usize>,
    #[arg(long)]
    pub max_tau: Option<usize>,
    #[arg(long)]
    pub node_budget: Option<u64>,
    /// Write the JSON search report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    with_workers(threads_from_env(), || match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_budget() {
                EXIT_BUDGET
            } else {
                EXIT_INPUT
            }
        }
    })
}

fn dispatch(cmd: Command) -> Result<i32, Error> {
    match cmd {
        Command::Construct(a) => construct(a),
        Command::Tau(a) => tau(a),
        Command::Iso(a) => iso(a),
        Command::Verify(a) => verify(a),
        Command::Enumerate(a) => enumerate(a),
    }
}

fn need<T>(v: Option<T>, flag: &str, what: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidParameter(format!("{what} needs --{flag}")))
}

fn construct(a: ConstructArgs) -> Result<i32, Error> {
    let family = match a.which {
        Construction::Mk => build_mk(need(a.k, "k", "mk")?)?,
        Construction::Factorization => {
            let k = need(a.k, "k", "factorization")?;
            let ts = build_one_factorization(k)?;
            SetFamily::new(k.div_ceil(2), ts.iter().map(|t| t.vertices().to_vec()).collect())?
                .with_comment(format!("disjoint transversals of M_{k}"))
        }
        Construction::Degree3 => build_degree3_family(need(a.m, "m", "degree3")?)?,
        Construction::Example => paper_example_family(),
    };
    let summary = format!(
        "k={} blocks={} vertices={}",
        family.k(),
        family.len(),
        family.vertex_count()
    );
    let format = a.format.map(Format::from);
    match &a.out {
        Some(path) => {
            write_family(path, &family, format)?;
            println!("{summary}");
        }
        None => {
            print!("{}", render(&family, format.unwrap_or(Format::Fam)));
            eprintln!("{summary}");
        }
    }
    Ok(EXIT_OK)
}

fn load(path: &Path, format: Option<FormatArg>) -> Result<SetFamily, Error> {
    read_family(path, format.map(Format::from))
}

fn join(vs: &[u32]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn tau(a: TauArgs) -> Result<i32, Error> {
    let f = load(&a.path, a.format)?;
    let r = exact_tau_with(
        &f,
        SolverOptions {
            node_budget: a.node_budget,
        },
    )?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "tau={}", r.tau)?;
    writeln!(out, "witness={}", join(&r.witness))?;
    writeln!(out, "degree_lower_bound={}", r.degree_lower_bound)?;
    writeln!(out, "nodes={}", r.search_nodes)?;
    if a.enumerate {
        let all = enumerate_min_transversals(&f)?;
        writeln!(out, "minimum_transversals={}", all.len())?;
        for t in &all {
            writeln!(out, "{}", join(t))?;
        }
    }
    Ok(EXIT_OK)
}

fn iso(a: IsoArgs) -> Result<i32, Error> {
    let fa = load(&a.a, None)?;
    let fb = load(&a.b, None)?;
    match isomorphism(&fa, &fb) {
        Some(map) => {
            println!("isomorphic");
            let pairs: Vec<String> = map.iter().map(|(x, y)| format!("{x}->{y}")).collect();
            println!("{}", pairs.join(" "));
            Ok(EXIT_OK)
        }
        None => {
            println!("not isomorphic");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn verify(a: VerifyArgs) -> Result<i32, Error> {
    let selection = Selection::parse(&a.suite)?;
    let mut report = run_suite(&selection);
    if a.no_timings {
        report = report.without_timings();
    }
    for c in &report.claims {
        let verdict = serde_json::to_value(c.verdict).expect("verdict serializes");
        println!(
            "{:<6} {} {}",
            verdict.as_str().unwrap_or("?"),
            c.id,
            c.params
        );
    }
    let s = report.summary;
    println!("pass={} fail={} error={}", s.pass, s.fail, s.error);
    if let Some(path) = &a.report {
        std::fs::write(path, report.to_json())?;
    }
    Ok(if s.fail > 0 {
        EXIT_NEGATIVE
    } else if s.error > 0 {
        EXIT_BUDGET
    } else {
        EXIT_OK
    })
}

fn enumerate(a: EnumerateArgs) -> Result<i32, Error> {
    let mut c = match (a.blocks, a.max_blocks) {
        (Some(b), _) => EnumerationConstraints::exactly(a.k, b),
        (None, Some(m)) => EnumerationConstraints::new(a.k, m),
        (None, None) => {
            return Err(Error::InvalidParameter(
                "enumerate needs --max-blocks or --blocks".into(),
            ))
        }
    };
    if a.intersecting {
        c = c.intersecting();
    }
    if let Some(n) = a.max_vertices {
        c = c.max_vertices(n);
    }
    c = c.degrees(a.min_degree, a.max_degree);
    if let Some(s) = a.pairwise {
        c = c.pairwise(s);
    }
    c = c.tau(TauFilter {
        min: a.min_tau,
        max: a.max_tau,
    });
    if let Some(b) = a.node_budget {
        c = c.budget(b);
    }
    let report = enumerate_families(&c)?;
    println!("classes={}", report.class_count);
    for (len, n) in report.classes.iter().fold(
        std::collections::BTreeMap::<usize, usize>::new(),
        |mut m, r| {
            *m.entry(r.length).or_default() += 1;
            m
        },
    ) {
        println!("length={len} classes={n}");
    }
    if let Some(path) = &a.out {
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        std::fs::write(path, s)?;
    }
    Ok(EXIT_OK)
}
