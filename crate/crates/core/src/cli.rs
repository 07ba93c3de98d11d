//! Command-line front end.
//!
//! Vertices are one-based on the command line and in every report. Exit
//! codes: 0 success, 1 negative outcome (fail, not equivalent, no match,
//! not reflectable), 2 inconclusive (bound exceeded), 64 usage or input error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use serde_json::{json, Value};

use crate::braiding::{
    canonicalize_with_permutation, cartan_matrix, m_exponent, reflect, BraidingMatrix, TwistClass,
};
use crate::catalog::{self, Classification, RowVerdict, VerificationReport};
use crate::error::Error;
use crate::groupoid::{
    enumerate_orbit, enumerate_real_roots, weyl_equivalent, Equivalence, Height, OrbitGraph,
    OrbitStatus, RealRoots, DEFAULT_BOUND,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "weyl-groupoid",
    version,
    about = "Reflections, Weyl-Brandt groupoid orbits and Weyl equivalence for braidings of diagonal type"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reflect at one vertex: m-row, p-row, s-matrix and reflected braiding.
    Reflect {
        #[command(flatten)]
        input: Input,
        /// One-based vertex to reflect at.
        #[arg(long = "i", value_name = "VERTEX")]
        vertex: usize,
        #[command(flatten)]
        opts: Options,
    },
    /// Table of the exponents m_ij.
    Mij {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Options,
    },
    /// Generalized Cartan matrix a_ij = -m_ij.
    Cartan {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Options,
    },
    /// Canonical twist class and its representative.
    Canon {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Options,
    },
    /// Orbit of the twist class under all reflections.
    Orbit {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Options,
    },
    /// Positive real roots and their heights.
    Roots {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Options,
    },
    /// Decide Weyl equivalence with a second braiding.
    Equiv {
        #[command(flatten)]
        input: Input,
        /// Second braiding: a file path or an inline matrix.
        #[arg(long, allow_hyphen_values = true)]
        second: String,
        #[command(flatten)]
        opts: Options,
    },
    /// Locate a rank 2 braiding in the classification table.
    Classify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Options,
    },
    /// Verify the classification table.
    Verify {
        /// Restrict to these row numbers (repeatable).
        #[arg(long)]
        row: Vec<u32>,
        #[command(flatten)]
        opts: Options,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Inline matrix, e.g. "t,1;t^-1,-1".
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,
    /// JSON matrix document {"rank": n, "entries": [...]}.
    #[arg(long, conflicts_with = "matrix")]
    file: Option<String>,
}

#[derive(Args, Debug)]
struct Options {
    #[arg(long, default_value_t = DEFAULT_BOUND, value_parser = parse_bound)]
    bound: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

fn parse_bound(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("bound must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(code: i32, message: String) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(EXIT_OK, text)
            };
        }
    };
    match execute(cli.command) {
        Ok(outcome) => outcome,
        Err(e) => Outcome::error(exit_code_for(&e), render_error(&e)),
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NotReflectable(_) | Error::UndefinedComposition | Error::NotUnimodular(_) => {
            EXIT_NEGATIVE
        }
        _ => EXIT_USAGE,
    }
}

/// Error text with one-based vertices.
fn render_error(e: &Error) -> String {
    match e {
        Error::NotReflectable(i) => format!(
            "vertex {} is not reflectable: some m_ij is undefined",
            i + 1
        ),
        Error::IndexOutOfRange { index, rank } => {
            format!("vertex {} out of range for rank {rank}", index + 1)
        }
        Error::DiagonalQuery(i) => format!("m_ij needs i != j (got i = j = {})", i + 1),
        other => other.to_string(),
    }
}

fn load_input(input: &Input) -> Result<BraidingMatrix, Error> {
    match (&input.matrix, &input.file) {
        (Some(m), None) => BraidingMatrix::parse_inline(m),
        (None, Some(path)) => read_matrix_file(Path::new(path)),
        _ => Err(Error::InvalidMatrix(
            "exactly one of --matrix or --file is required".into(),
        )),
    }
}

fn read_matrix_file(path: &Path) -> Result<BraidingMatrix, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidMatrix(format!("cannot read {}: {e}", path.display())))?;
    BraidingMatrix::from_json(&text)
}

fn load_second(spec: &str) -> Result<BraidingMatrix, Error> {
    let path = Path::new(spec);
    if path.is_file() {
        read_matrix_file(path)
    } else {
        BraidingMatrix::parse_inline(spec)
    }
}

fn require_format(format: Format, allowed: &[Format], command: &str) -> Result<(), Error> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Error::InvalidMatrix(format!(
            "format {format:?} is not available for `{command}`"
        )))
    }
}

fn to_json(value: Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
    s.push('\n');
    s
}

fn matrix_json(m: &BraidingMatrix) -> Value {
    json!({ "rank": m.rank(), "entries": m.entries() })
}

fn class_json(c: &TwistClass) -> Value {
    json!({ "diagonal": c.diagonal(), "products": c.products() })
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn execute(command: Command) -> Result<Outcome, Error> {
    const TEXT_JSON: &[Format] = &[Format::Text, Format::Json];
    match command {
        Command::Reflect {
            input,
            vertex,
            opts,
        } => {
            require_format(opts.format, TEXT_JSON, "reflect")?;
            let m = load_input(&input)?;
            if vertex == 0 || vertex > m.rank() {
                return Err(Error::IndexOutOfRange {
                    index: vertex.wrapping_sub(1),
                    rank: m.rank(),
                });
            }
            let data = reflect(&m, vertex - 1)?;
            let (class, _) = canonicalize_with_permutation(&data.reflected);
            let p_cells: Vec<String> = data
                .p_row
                .iter()
                .map(|p| p.as_ref().map_or("-".to_string(), |p| p.to_string()))
                .collect();
            let out = match opts.format {
                Format::Json => to_json(json!({
                    "schema": SCHEMA,
                    "command": "reflect",
                    "input": matrix_json(&m),
                    "vertex": vertex,
                    "m_row": data.m_row,
                    "p_row": data.p_row,
                    "s_matrix": data.s_matrix,
                    "reflected": matrix_json(&data.reflected),
                    "reflected_class": class_json(&class),
                })),
                _ => format!(
                    "matrix: {m}\nvertex: {vertex}\nm: {}\np: {}\ns: {}\nreflected: {}\nclass: {class}\n",
                    data.m_row.iter().join(" "),
                    p_cells.join(" "),
                    data.s_matrix,
                    data.reflected,
                ),
            };
            Ok(Outcome::ok(EXIT_OK, out))
        }
        Command::Mij { input, opts } => {
            require_format(opts.format, TEXT_JSON, "mij")?;
            let m = load_input(&input)?;
            let n = m.rank();
            let mut table: Vec<Vec<Option<u32>>> = vec![vec![None; n]; n];
            for (i, j) in (0..n).cartesian_product(0..n).filter(|(i, j)| i != j) {
                table[i][j] = m_exponent(&m, i, j)?;
            }
            let out = match opts.format {
                Format::Json => to_json(json!({
                    "schema": SCHEMA,
                    "command": "mij",
                    "input": matrix_json(&m),
                    "m": table,
                })),
                _ => {
                    let mut s = format!("matrix: {m}\n");
                    for (i, row) in table.iter().enumerate() {
                        let cells = row.iter().enumerate().map(|(j, v)| match v {
                            _ if i == j => "*".to_string(),
                            Some(v) => v.to_string(),
                            None => "-".to_string(),
                        });
                        s.push_str(&format!("m[{}]: {}\n", i + 1, cells.format(" ")));
                    }
                    s
                }
            };
            Ok(Outcome::ok(EXIT_OK, out))
        }
        Command::Cartan { input, opts } => {
            require_format(opts.format, TEXT_JSON, "cartan")?;
            let m = load_input(&input)?;
            let a = cartan_matrix(&m)?;
            let out = match opts.format {
                Format::Json => to_json(json!({
                    "schema": SCHEMA,
                    "command": "cartan",
                    "input": matrix_json(&m),
                    "cartan": a,
                })),
                _ => format!("{a}\n"),
            };
            Ok(Outcome::ok(EXIT_OK, out))
        }
        Command::Canon { input, opts } => {
            require_format(opts.format, TEXT_JSON, "canon")?;
            let m = load_input(&input)?;
            let (class, perm) = canonicalize_with_permutation(&m);
            let rep = crate::braiding::rep_matrix(&class);
            let out = match opts.format {
                Format::Json => to_json(json!({
                    "schema": SCHEMA,
                    "command": "canon",
                    "input": matrix_json(&m),
                    "class": class_json(&class),
                    "representative": matrix_json(&rep),
                    "permutation": one_based(&perm),
                })),
                _ => format!(
                    "class: {class}\nrepresentative: {rep}\npermutation: {}\n",
                    one_based(&perm).iter().join(" ")
                ),
            };
            Ok(Outcome::ok(EXIT_OK, out))
        }
        Command::Orbit { input, opts } => {
            let m = load_input(&input)?;
            let g = enumerate_orbit(&m, opts.bound);
            let code = if g.is_complete() {
                EXIT_OK
            } else {
                EXIT_INCONCLUSIVE
            };
            let out = match opts.format {
                Format::Dot => g.to_dot(),
                Format::Json => to_json(orbit_json(&m, &g, opts.bound)),
                Format::Text => orbit_text(&g),
            };
            Ok(Outcome::ok(code, out))
        }
        Command::Roots { input, opts } => {
            require_format(opts.format, TEXT_JSON, "roots")?;
            let m = load_input(&input)?;
            let roots = enumerate_real_roots(&m, opts.bound);
            let (code, out) = match (&roots, opts.format) {
                (RealRoots::Inconclusive, Format::Json) => (
                    EXIT_INCONCLUSIVE,
                    to_json(json!({
                        "schema": SCHEMA,
                        "command": "roots",
                        "input": matrix_json(&m),
                        "status": "inconclusive",
                        "bound": opts.bound,
                    })),
                ),
                (RealRoots::Inconclusive, _) => (
                    EXIT_INCONCLUSIVE,
                    format!("inconclusive: more than {} bases reached\n", opts.bound),
                ),
                (RealRoots::Complete(list), Format::Json) => {
                    let items: Vec<Value> = list
                        .iter()
                        .map(|r| {
                            let h = match r.height {
                                Height::Finite(h) => json!(h),
                                Height::Infinite => json!("infinite"),
                            };
                            json!({ "root": r.root, "height": h })
                        })
                        .collect();
                    (
                        EXIT_OK,
                        to_json(json!({
                            "schema": SCHEMA,
                            "command": "roots",
                            "input": matrix_json(&m),
                            "status": "complete",
                            "roots": items,
                        })),
                    )
                }
                (RealRoots::Complete(list), _) => {
                    let mut s = format!("roots: {}\n", list.len());
                    for r in list {
                        let h = match r.height {
                            Height::Finite(h) => h.to_string(),
                            Height::Infinite => "inf".to_string(),
                        };
                        s.push_str(&format!("  ({})  height {h}\n", r.root.iter().join(", ")));
                    }
                    (EXIT_OK, s)
                }
            };
            Ok(Outcome::ok(code, out))
        }
        Command::Equiv {
            input,
            second,
            opts,
        } => {
            require_format(opts.format, TEXT_JSON, "equiv")?;
            let a = load_input(&input)?;
            let b = load_second(&second)?;
            let verdict = weyl_equivalent(&a, &b, opts.bound)?;
            let (code, label) = match verdict {
                Equivalence::Equivalent => (EXIT_OK, "equivalent"),
                Equivalence::NotEquivalent => (EXIT_NEGATIVE, "not equivalent"),
                Equivalence::Inconclusive => (EXIT_INCONCLUSIVE, "inconclusive"),
            };
            let out = match opts.format {
                Format::Json => to_json(json!({
                    "schema": SCHEMA,
                    "command": "equiv",
                    "first": matrix_json(&a),
                    "second": matrix_json(&b),
                    "result": label.replace(' ', "_"),
                })),
                _ => format!("{label}\n"),
            };
            Ok(Outcome::ok(code, out))
        }
        Command::Classify { input, opts } => {
            require_format(opts.format, TEXT_JSON, "classify")?;
            let m = load_input(&input)?;
            let result = catalog::classify(&m, opts.bound)?;
            let code = match &result {
                Classification::Match { .. } => EXIT_OK,
                Classification::NoMatch => EXIT_NEGATIVE,
                Classification::Inconclusive => EXIT_INCONCLUSIVE,
            };
            let out = match opts.format {
                Format::Json => {
                    let body = match &result {
                        Classification::Match {
                            row_id,
                            assignment,
                            form,
                            free_value,
                        } => json!({
                            "result": "match",
                            "row": row_id,
                            "assignment": assignment,
                            "form": form + 1,
                            "free_value": free_value,
                        }),
                        Classification::NoMatch => json!({ "result": "no_match" }),
                        Classification::Inconclusive => json!({ "result": "inconclusive" }),
                    };
                    to_json(json!({
                        "schema": SCHEMA,
                        "command": "classify",
                        "input": matrix_json(&m),
                        "classification": body,
                    }))
                }
                _ => match &result {
                    Classification::Match {
                        row_id,
                        assignment,
                        form,
                        free_value,
                    } => {
                        let mut s = format!("match: row {row_id}\nform: {}\n", form + 1);
                        for (k, v) in assignment {
                            s.push_str(&format!("fixed: {k} = {v}\n"));
                        }
                        if let Some(v) = free_value {
                            s.push_str(&format!("free: {v}\n"));
                        }
                        s
                    }
                    Classification::NoMatch => "no match\n".to_string(),
                    Classification::Inconclusive => "inconclusive\n".to_string(),
                },
            };
            Ok(Outcome::ok(code, out))
        }
        Command::Verify { row, opts } => {
            require_format(opts.format, TEXT_JSON, "verify")?;
            let filter: Option<BTreeSet<u32>> = if row.is_empty() {
                None
            } else {
                let known: BTreeSet<u32> = catalog::builtin().iter().map(|r| r.row_id).collect();
                if let Some(bad) = row.iter().find(|r| !known.contains(r)) {
                    return Err(Error::InvalidMatrix(format!("no row {bad} in the table")));
                }
                Some(row.into_iter().collect())
            };
            let report = catalog::verify_all(opts.bound, filter.as_ref());
            let code = if report.any_fail() {
                EXIT_NEGATIVE
            } else if report.all_pass() {
                EXIT_OK
            } else {
                EXIT_INCONCLUSIVE
            };
            let out = match opts.format {
                Format::Json => to_json(verify_json(&report)),
                _ => verify_text(&report),
            };
            Ok(Outcome::ok(code, out))
        }
    }
}

fn status_label(s: OrbitStatus) -> &'static str {
    match s {
        OrbitStatus::Complete => "complete",
        OrbitStatus::BoundExceeded => "bound_exceeded",
    }
}

fn orbit_json(m: &BraidingMatrix, g: &OrbitGraph, bound: usize) -> Value {
    json!({
        "schema": SCHEMA,
        "command": "orbit",
        "input": matrix_json(m),
        "bound": bound,
        "status": status_label(g.status),
        "nodes": g.nodes.iter().map(|n| json!({
            "index": n.index,
            "class": class_json(&n.class),
            "representative": matrix_json(&n.representative),
        })).collect::<Vec<_>>(),
        "edges": g.edges.iter().map(|e| json!({
            "from": e.from,
            "vertex": e.vertex + 1,
            "to": e.to,
            "s_matrix": e.s_matrix,
            "relabel": one_based(&e.relabel),
        })).collect::<Vec<_>>(),
        "dead_ends": g.dead_ends.iter().map(|d| json!({
            "node": d.node,
            "vertex": d.vertex + 1,
        })).collect::<Vec<_>>(),
    })
}

fn orbit_text(g: &OrbitGraph) -> String {
    let mut s = format!(
        "status: {}\nnodes: {}\n",
        status_label(g.status),
        g.nodes.len()
    );
    for n in &g.nodes {
        s.push_str(&format!(
            "  [{}] {}  rep: {}\n",
            n.index, n.class, n.representative
        ));
    }
    s.push_str(&format!("edges: {}\n", g.edges.len()));
    for e in &g.edges {
        s.push_str(&format!(
            "  {} --s{}--> {}  s = {}\n",
            e.from,
            e.vertex + 1,
            e.to,
            e.s_matrix
        ));
    }
    if g.dead_ends.is_empty() {
        s.push_str("dead ends: none\n");
    } else {
        let cells = g
            .dead_ends
            .iter()
            .map(|d| format!("{}@s{}", d.node, d.vertex + 1));
        s.push_str(&format!("dead ends: {}\n", cells.format(" ")));
    }
    s
}

fn assignment_label(a: &catalog::Assignment) -> String {
    if a.is_empty() {
        "-".to_string()
    } else {
        a.iter().map(|(k, v)| format!("{k}={v}")).join(" ")
    }
}

fn verify_text(report: &VerificationReport) -> String {
    let mut s = format!("bound: {}\n", report.bound);
    s.push_str(&format!(
        "{:>4}  {:<22} {:>5}  {}\n",
        "row", "trees", "inst", "verdict"
    ));
    for r in &report.rows {
        s.push_str(&format!(
            "{:>4}  {:<22} {:>5}  {}\n",
            r.row_id,
            r.trees.iter().dedup().join(","),
            r.instantiations,
            r.verdict
        ));
    }
    let failing: Vec<_> = report
        .instantiations
        .iter()
        .filter(|i| !i.verdict.is_pass())
        .collect();
    if !failing.is_empty() {
        s.push_str("not passing:\n");
        for i in failing {
            s.push_str(&format!(
                "  row {} [{}]: {} (classes {}, orbit {})\n",
                i.row_id,
                assignment_label(&i.assignment),
                i.verdict.label(),
                i.class_count,
                i.orbit_size
            ));
        }
    }
    let d = &report.disjointness;
    s.push_str(&format!(
        "disjointness: {} cross-row pairs tested, {} overlaps\n",
        d.pairs_tested,
        d.overlaps.len()
    ));
    s.push_str(&format!(
        "same-row pairs (recorded): {} identical, {} disjoint, {} partial\n",
        d.same_row.identical, d.same_row.disjoint, d.same_row.partial
    ));
    let passed = report.rows.iter().filter(|r| r.verdict == "PASS").count();
    s.push_str(&format!(
        "result: {passed}/{} rows pass\n",
        report.rows.len()
    ));
    s
}

fn verify_json(report: &VerificationReport) -> Value {
    let insts: Vec<Value> = report
        .instantiations
        .iter()
        .map(|i| {
            let verdict = match &i.verdict {
                RowVerdict::Fail {
                    outside_row,
                    unreached,
                    dead_ends,
                } => json!({
                    "verdict": "fail",
                    "outside_row": outside_row.iter().map(class_json).collect::<Vec<_>>(),
                    "unreached": unreached.iter().map(class_json).collect::<Vec<_>>(),
                    "dead_ends": dead_ends.iter().map(|(n, v)| json!({"node": n, "vertex": v + 1})).collect::<Vec<_>>(),
                }),
                RowVerdict::Pass => json!({ "verdict": "pass" }),
                RowVerdict::Inconclusive => json!({ "verdict": "inconclusive" }),
            };
            json!({
                "row": i.row_id,
                "assignment": i.assignment,
                "class_count": i.class_count,
                "orbit_size": i.orbit_size,
                "result": verdict,
            })
        })
        .collect();
    json!({
        "schema": SCHEMA,
        "command": "verify",
        "bound": report.bound,
        "rows": report.rows.iter().map(|r| json!({
            "row": r.row_id,
            "trees": r.trees,
            "instantiations": r.instantiations,
            "verdict": r.verdict.to_lowercase(),
        })).collect::<Vec<_>>(),
        "instantiations": insts,
        "disjointness": {
            "pairs_tested": report.disjointness.pairs_tested,
            "overlaps": report.disjointness.overlaps,
            "same_row": report.disjointness.same_row,
        },
    })
}
