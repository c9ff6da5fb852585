//! `x0quot`: genera, fixed points and biellipticity screening for quotients
//! of X0(N) by Atkin-Lehner and extended involution groups.
//!
//! Exit codes: 0 success, 1 integrity failure, 2 usage error, 3 missing data.

use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use x0quot::atlas::data::Datasets;
use x0quot::atlas::report::{self, Format};
use x0quot::atlas::{self, golden, QuadPoints, Status};
use x0quot::involutions::{fix_count, fix_table, group_closure, quotient_genus_hurwitz, ExtInvolution};
use x0quot::modsym::invariant_genus;
use x0quot::ntheory::is_hall;
use x0quot::{AlSubgroup, Error};

const DATA_DIR_ENV: &str = "X0QUOT_DATA_DIR";

#[derive(Parser)]
#[command(name = "x0quot", version, about = "Quotients of X0(N) by Atkin-Lehner and extended involutions")]
struct Cli {
    /// Output format: markdown, csv or json.
    #[arg(long, global = true, default_value = "markdown")]
    format: String,
    /// Include rule traces and provenance.
    #[arg(long, global = true)]
    trace: bool,
    /// Directory holding the data files (default: embedded copies, or $X0QUOT_DATA_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PairArgs {
    level: u64,
    /// Atkin-Lehner generators, e.g. "w8,w3".
    #[arg(long)]
    w: Option<String>,
    /// Every pair in scope at this level.
    #[arg(long)]
    all: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Genus of X0(N)/W; with --all, the genus table of the level.
    Genus(PairArgs),
    /// Fixed points on X0(N) of one involution (--w "V2*w40") or of all (--all).
    Fix(PairArgs),
    /// Genus of X0(N) modulo the group generated by --gens.
    GroupGenus {
        level: u64,
        /// Generators, e.g. "w9,V3*w7".
        #[arg(long)]
        gens: String,
    },
    /// Runs the screening pipeline on one pair, or every pair of the level.
    Screen(PairArgs),
    /// Classifies every pair in scope, or those of one level.
    Classify {
        #[arg(long)]
        level: Option<u64>,
    },
    /// Whether X0(N)/W has infinitely many quadratic points.
    Quadpoints(PairArgs),
    /// Re-checks the embedded reference data; all checks when no flag is given.
    Selftest {
        #[arg(long)]
        appendix_a: bool,
        #[arg(long)]
        fix_tables: bool,
        #[arg(long)]
        theorems: bool,
    },
}

enum Failure {
    Usage(String),
    Integrity(String),
    MissingData(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::MissingData(_) => Failure::MissingData(e.to_string()),
            Error::Integrity(_) | Error::Parse { .. } | Error::DuplicateLabel(_) => Failure::Integrity(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: String) -> Res<T> {
    Err(Failure::Usage(msg))
}

fn check_level(n: u64) -> Res<()> {
    if n < 1 {
        return usage("level must be positive".into());
    }
    Ok(())
}

/// Parses "w8,w3", naming the offending token on failure.
fn parse_subgroup(n: u64, text: &str) -> Res<AlSubgroup> {
    let mut gens = Vec::new();
    for tok in text.split(',').map(str::trim) {
        let d: u64 = match tok.strip_prefix('w').and_then(|d| d.parse().ok()) {
            Some(d) => d,
            None => return usage(format!("invalid subgroup token '{tok}': expected wD")),
        };
        if !is_hall(d, n) {
            return usage(format!("invalid subgroup token '{tok}': {d} is not a Hall divisor of {n}"));
        }
        gens.push(d);
    }
    Ok(AlSubgroup::generated(n, &gens)?)
}

fn parse_element(n: u64, tok: &str) -> Res<ExtInvolution> {
    ExtInvolution::parse(n, tok).map_err(|e| Failure::Usage(format!("invalid element '{tok}': {e}")))
}

fn subgroup_or_trivial(n: u64, w: &Option<String>) -> Res<AlSubgroup> {
    match w {
        Some(t) => parse_subgroup(n, t),
        None => Ok(AlSubgroup::trivial(n)),
    }
}

fn datasets(cli: &Cli) -> Res<Datasets> {
    let dir = cli.data_dir.clone().or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from));
    Ok(match dir {
        Some(d) => Datasets::load_dir(&d)?,
        None => Datasets::embedded()?,
    })
}

fn records_for(data: &Datasets, args: &PairArgs) -> Res<Vec<atlas::PairRecord>> {
    check_level(args.level)?;
    let n = args.level;
    match (&args.w, args.all) {
        (Some(_), true) => usage("--w and --all are exclusive".into()),
        (Some(w), false) => Ok(vec![atlas::classify_pair(data, n, &parse_subgroup(n, w)?)?]),
        (None, true) => {
            let pairs = atlas::pairs_at_level(n)?;
            if pairs.is_empty() {
                return usage(format!("no pairs in scope at level {n}"));
            }
            Ok(pairs.iter().map(|(n, w)| atlas::classify_pair(data, *n, w)).collect::<Result<_, _>>()?)
        }
        (None, false) => usage("one of --w or --all is required".into()),
    }
}

fn status_line(r: &atlas::PairRecord) -> String {
    match &r.status {
        Status::BiellipticConfirmed { witness } => {
            format!("{} {} {}", r.status.name(), witness.involution, witness.field)
        }
        Status::Adjudicated { verdict, source } => format!("{} {verdict} {source}", r.status.name()),
        other => other.name().to_string(),
    }
}

fn quad_line(q: &QuadPoints) -> String {
    match q {
        QuadPoints::Infinite(why) => format!("infinite ({why})"),
        QuadPoints::Finite => "finite".into(),
        QuadPoints::NotApplicable => "n/a".into(),
    }
}

fn selftest(appendix: bool, fixes: bool, theorems: bool, out: &mut String) -> Res<()> {
    let all = !(appendix || fixes || theorems);
    let mut failures = Vec::new();
    if appendix || all {
        let (ok, bad) = golden::check_appendix_a()?;
        let misprints = bad.iter().filter(|c| c.misprint).count();
        out.push_str(&format!("appendix-a: {ok} cells verified, {misprints} printed cells inconsistent\n"));
        for c in &bad {
            let line = format!(
                "  ({},{}) printed {} computed {}{}\n",
                c.cell.n,
                c.cell.subgroup,
                c.cell.genus,
                c.computed,
                if c.misprint { " (violates its own column)" } else { "" }
            );
            out.push_str(&line);
            if !c.misprint {
                failures.push(format!("appendix-a ({},{})", c.cell.n, c.cell.subgroup));
            }
        }
    }
    if fixes || all {
        let mut count = 0;
        for (n, table) in FIX_TABLES {
            for (name, expected) in *table {
                count += 1;
                let got = fix_count(&ExtInvolution::parse(*n, name)?)?;
                if got != *expected {
                    failures.push(format!("fix {name} at {n}: {got} != {expected}"));
                }
            }
        }
        out.push_str(&format!("fix-tables: {count} counts checked\n"));
    }
    if theorems || all {
        let data = Datasets::embedded()?;
        let records = atlas::classify_all(&data)?;
        let listed = atlas::listed_bielliptic(&data)?;
        let bielliptic: Vec<_> = records.iter().filter(|r| r.status.is_bielliptic()).collect();
        let same = bielliptic.len() == listed.len()
            && bielliptic.iter().zip(&listed).all(|(r, (n, w, g))| r.n == *n && r.w == *w && r.genus == *g);
        if !same {
            failures.push("bielliptic set differs from the listed pairs".into());
        }
        let infinite: Vec<_> =
            records.iter().filter(|r| matches!(r.quadratic_points, QuadPoints::Infinite(_))).collect();
        let expected_inf = records
            .iter()
            .filter(|r| data.is_listed_hyperelliptic(r.n, &r.w) || (r.n == 99 && r.w.order() == 2))
            .count();
        if infinite.len() != expected_inf {
            failures.push("quadratic points differ from the listed pairs".into());
        }
        for r in &records {
            atlas::audit(r)?;
        }
        let s = atlas::summarize(&records);
        out.push_str(&format!(
            "theorems: {} pairs, {} bielliptic, {} adjudicated, {} with infinitely many quadratic points\n",
            s.pairs,
            bielliptic.len(),
            s.adjudicated,
            infinite.len()
        ));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Integrity(failures.join("; ")))
    }
}

const FIX_TABLES: &[(u64, &[(&str, u64)])] = &[
    (
        120,
        &[
            ("w8", 0), ("w3", 0), ("w5", 0), ("w24", 8), ("w40", 0), ("w15", 16), ("w120", 8), ("V2", 0),
            ("V2*w8", 0), ("V2*w3", 8), ("V2*w5", 0), ("V2*w24", 0), ("V2*w40", 16), ("V2*w15", 8),
            ("V2*w120", 0),
        ],
    ),
    (
        252,
        &[
            ("w4", 8), ("w9", 0), ("w7", 0), ("w36", 0), ("w28", 0), ("w63", 24), ("w252", 8), ("V3", 0),
            ("V3*w4", 0), ("V3*w9", 0), ("V3*w7", 24), ("V3*w36", 0), ("V3*w28", 8), ("V3*w63", 24),
            ("V3*w252", 8),
        ],
    ),
    (176, &[("w16", 0), ("w11", 0), ("w176", 12), ("V2", 0), ("V2*w16", 4), ("V2*w11", 12), ("V2*w176", 24)]),
];

fn run(cli: &Cli, out: &mut String) -> Res<()> {
    let format: Format = cli.format.parse().map_err(|_| Failure::Usage(format!("unknown format '{}'", cli.format)))?;
    match &cli.command {
        Command::Genus(a) => {
            check_level(a.level)?;
            if a.all {
                if a.w.is_some() {
                    return usage("--w and --all are exclusive".into());
                }
                out.push_str(&report::genus_matrix(&[a.level], format)?);
            } else {
                let w = subgroup_or_trivial(a.level, &a.w)?;
                out.push_str(&format!("{}\n", invariant_genus(a.level, &w)?));
            }
        }
        Command::Fix(a) => {
            check_level(a.level)?;
            match (&a.w, a.all) {
                (Some(e), false) => {
                    let v = parse_element(a.level, e)?;
                    out.push_str(&format!("{}\n", fix_count(&v)?));
                }
                (None, true) => {
                    let t = fix_table(a.level)?;
                    match format {
                        Format::Json => {
                            let rows: Vec<serde_json::Value> = t
                                .entries
                                .iter()
                                .map(|(e, c)| serde_json::json!({ "element": e.to_string(), "count": c }))
                                .collect();
                            out.push_str(&serde_json::to_string_pretty(&rows).expect("json"));
                            out.push('\n');
                        }
                        Format::Csv => {
                            out.push_str("element,count\n");
                            for (e, c) in &t.entries {
                                out.push_str(&format!("{e},{c}\n"));
                            }
                        }
                        Format::Markdown => out.push_str(&t.to_tsv()),
                    }
                }
                _ => return usage("fix takes exactly one of --w ELEMENT or --all".into()),
            }
        }
        Command::GroupGenus { level, gens } => {
            check_level(*level)?;
            let mut els = Vec::new();
            for tok in gens.split(',').map(str::trim) {
                els.push(parse_element(*level, tok)?);
            }
            let g = group_closure(*level, &els)
                .map_err(|e| Failure::Usage(format!("invalid generators '{gens}': {e}")))?;
            out.push_str(&format!("{}\n", quotient_genus_hurwitz(*level, &g)?));
            if cli.trace {
                let names: Vec<String> = g.elements.iter().map(|e| e.to_string()).collect();
                out.push_str(&format!("group {}\n", names.join(" ")));
            }
        }
        Command::Screen(a) => {
            let data = datasets(cli)?;
            let recs = records_for(&data, a)?;
            if format != Format::Markdown {
                out.push_str(&report::emit(&recs, format, cli.trace)?);
                return Ok(());
            }
            for r in &recs {
                if recs.len() > 1 {
                    out.push_str(&format!("{} {} ", r.n, r.w));
                }
                out.push_str(&status_line(r));
                out.push('\n');
                if cli.trace {
                    for s in &r.trace {
                        out.push_str(&format!("  {s}\n"));
                    }
                    if let Status::BiellipticConfirmed { witness } = &r.status {
                        for c in &witness.chain {
                            out.push_str(&format!("  via {c}\n"));
                        }
                    }
                }
            }
        }
        Command::Classify { level } => {
            let data = datasets(cli)?;
            let records = match level {
                Some(n) => {
                    check_level(*n)?;
                    let recs = atlas::classify_all(&data)?;
                    recs.into_iter().filter(|r| r.n == *n).collect()
                }
                None => atlas::classify_all(&data)?,
            };
            out.push_str(&report::emit(&records, format, cli.trace)?);
        }
        Command::Quadpoints(a) => {
            let data = datasets(cli)?;
            let recs = records_for(&data, a)?;
            for r in &recs {
                if recs.len() > 1 {
                    out.push_str(&format!("{} {} ", r.n, r.w));
                }
                out.push_str(&quad_line(&r.quadratic_points));
                out.push('\n');
            }
        }
        Command::Selftest { appendix_a, fix_tables, theorems } => {
            selftest(*appendix_a, *fix_tables, *theorems, out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(&cli, &mut out);
    let _ = std::io::stdout().write_all(out.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Integrity(m) => (1, m),
                Failure::Usage(m) => (2, m),
                Failure::MissingData(m) => (3, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
