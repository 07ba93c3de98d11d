//! The rank 2 table of Weyl equivalence classes and its verification.
//!
//! Each row lists one or more forms `(q11, q21, q22)` (with `q12 = 1`), a
//! possibly empty set of values for a free parameter, and the domains of the
//! fixed parameters. Two braidings in the table are Weyl equivalent iff they
//! come from the same row with the same fixed parameters. The verifier checks
//! this by instantiating each row, enumerating the orbit of one member, and
//! comparing node sets; it also checks that different rows never share a
//! class.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::braiding::{canonicalize, rep_matrix, BraidingMatrix, TwistClass};
use crate::error::{Error, Result};
use crate::groupoid::enumerate_orbit;
use crate::scalar::{Order, Scalar};

/// Root-of-unity orders that appear in the table.
pub const ROOT_ORDERS: [u64; 9] = [3, 5, 8, 12, 14, 18, 20, 24, 30];

/// Bound used when verifying rows; every row closes well within it.
pub const VERIFY_BOUND: usize = 64;

/// Formal parameters substituted for transcendental fixed symbols, in order.
pub const FORMAL_NAMES: [&str; 2] = ["t", "s"];

const TABLE_JSON: &str = include_str!("../data/rank2_table.json");

pub type Assignment = BTreeMap<String, Scalar>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Form {
    pub q11: Scalar,
    pub q21: Scalar,
    pub q22: Scalar,
    pub tree: String,
}

impl Form {
    pub fn substitute(&self, values: &Assignment) -> Form {
        Form {
            q11: self.q11.substitute_all(values),
            q21: self.q21.substitute_all(values),
            q22: self.q22.substitute_all(values),
            tree: self.tree.clone(),
        }
    }

    pub fn matrix(&self) -> BraidingMatrix {
        BraidingMatrix::rank2(self.q11.clone(), self.q21.clone(), self.q22.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Transcendental { exclusions: Vec<Scalar> },
    RootsOfUnity(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedParameter {
    pub symbol: String,
    pub domain: Domain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FreeDocument", into = "FreeDocument")]
pub struct FreeParameter {
    pub symbol: String,
    pub values: FreeValues,
}

/// Values of the free parameter, as expressions in the fixed symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreeValues {
    List(Vec<Scalar>),
    RootsOfUnity(Vec<u64>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct FreeDocument {
    symbol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    roots_of_unity: Option<Vec<u64>>,
}

impl TryFrom<FreeDocument> for FreeParameter {
    type Error = String;

    fn try_from(doc: FreeDocument) -> Result<Self, String> {
        let values = match (doc.values, doc.roots_of_unity) {
            (Some(v), None) => FreeValues::List(v),
            (None, Some(r)) => FreeValues::RootsOfUnity(r),
            _ => {
                return Err("free parameter needs exactly one of `values`, `roots_of_unity`".into())
            }
        };
        Ok(FreeParameter {
            symbol: doc.symbol,
            values,
        })
    }
}

impl From<FreeParameter> for FreeDocument {
    fn from(p: FreeParameter) -> Self {
        let (values, roots_of_unity) = match p.values {
            FreeValues::List(v) => (Some(v), None),
            FreeValues::RootsOfUnity(r) => (None, Some(r)),
        };
        FreeDocument {
            symbol: p.symbol,
            values,
            roots_of_unity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogRow {
    #[serde(rename = "row")]
    pub row_id: u32,
    pub forms: Vec<Form>,
    pub free: Option<FreeParameter>,
    pub fixed: Vec<FixedParameter>,
}

impl CatalogRow {
    pub fn trees(&self) -> Vec<&str> {
        self.forms.iter().map(|f| f.tree.as_str()).collect()
    }

    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidMatrix(format!("row {}: {msg}", self.row_id)));
        if self.forms.is_empty() {
            return fail("no forms".into());
        }
        let symbols: Vec<&str> = self.fixed.iter().map(|p| p.symbol.as_str()).collect();
        if symbols.iter().duplicates().next().is_some() {
            return fail("duplicate fixed symbol".into());
        }
        if let Some(free) = &self.free {
            if symbols.contains(&free.symbol.as_str()) {
                return fail(format!("free symbol {} is also fixed", free.symbol));
            }
            if let FreeValues::RootsOfUnity(orders) = &free.values {
                check_orders(orders).or_else(fail)?;
            }
        }
        for p in &self.fixed {
            if let Domain::RootsOfUnity(orders) = &p.domain {
                check_orders(orders).or_else(fail)?;
            }
        }
        Ok(())
    }

    /// Concrete free-parameter values under `assignment`; `None` stands for
    /// the row having no free parameter.
    fn free_values(&self, assignment: &Assignment) -> Vec<Option<Scalar>> {
        match &self.free {
            None => vec![None],
            Some(free) => match &free.values {
                FreeValues::List(v) => v
                    .iter()
                    .map(|x| Some(x.substitute_all(assignment)))
                    .collect(),
                FreeValues::RootsOfUnity(orders) => orders
                    .iter()
                    .flat_map(|&r| Scalar::primitive_roots(r))
                    .map(Some)
                    .collect(),
            },
        }
    }

    /// Forms with the free parameter replaced, before fixing anything else.
    fn specialized_forms(&self, assignment: &Assignment) -> Vec<(usize, Option<Scalar>, Form)> {
        let mut out = Vec::new();
        for (k, form) in self.forms.iter().enumerate() {
            for value in self.free_values(assignment) {
                let f = match (&self.free, &value) {
                    (Some(free), Some(v)) => {
                        form.substitute(&BTreeMap::from([(free.symbol.clone(), v.clone())]))
                    }
                    _ => form.clone(),
                };
                out.push((k, value, f));
            }
        }
        out
    }

    /// Checks that `assignment` fixes exactly this row's symbols, each within its domain.
    pub fn check_assignment(&self, assignment: &Assignment) -> Result<()> {
        let want: BTreeSet<&str> = self.fixed.iter().map(|p| p.symbol.as_str()).collect();
        let got: BTreeSet<&str> = assignment.keys().map(String::as_str).collect();
        if want != got {
            return Err(Error::DomainViolation(format!(
                "row {} fixes {{{}}}, assignment gives {{{}}}",
                self.row_id,
                want.iter().join(", "),
                got.iter().join(", ")
            )));
        }
        for p in &self.fixed {
            let v = &assignment[&p.symbol];
            match &p.domain {
                Domain::RootsOfUnity(orders) => match v.multiplicative_order() {
                    Order::Finite(r) if orders.contains(&r) => {}
                    _ => {
                        return Err(Error::DomainViolation(format!(
                            "{} = {v} is not a primitive root of unity of order in {orders:?}",
                            p.symbol
                        )))
                    }
                },
                Domain::Transcendental { exclusions } => {
                    if v.multiplicative_order() != Order::Infinite {
                        return Err(Error::DomainViolation(format!(
                            "{} = {v} must be transcendental; specializations are not verified",
                            p.symbol
                        )));
                    }
                    if exclusions
                        .iter()
                        .any(|x| &x.substitute_all(assignment) == v)
                    {
                        return Err(Error::DomainViolation(format!(
                            "{} = {v} is excluded",
                            p.symbol
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn instantiate(&self, assignment: &Assignment) -> Result<RowInstantiation> {
        self.check_assignment(assignment)?;
        let class_set = self
            .specialized_forms(assignment)
            .into_iter()
            .map(|(_, _, f)| canonicalize(&f.substitute(assignment).matrix()))
            .collect();
        Ok(RowInstantiation {
            row_id: self.row_id,
            assignment: assignment.clone(),
            class_set,
        })
    }

    /// Every admissible assignment: each primitive root of each listed order,
    /// and the formal parameters `names[0], names[1], ...` for the
    /// transcendental symbols in order.
    pub fn assignments_with_names(&self, names: &[&str]) -> Vec<Assignment> {
        let mut formal = names.iter();
        let choices: Vec<Vec<(String, Scalar)>> = self
            .fixed
            .iter()
            .map(|p| match &p.domain {
                Domain::RootsOfUnity(orders) => orders
                    .iter()
                    .flat_map(|&r| Scalar::primitive_roots(r))
                    .map(|v| (p.symbol.clone(), v))
                    .collect(),
                Domain::Transcendental { .. } => {
                    let name = formal.next().expect("enough formal names");
                    vec![(p.symbol.clone(), Scalar::param(name))]
                }
            })
            .collect();
        if choices.is_empty() {
            return vec![Assignment::new()];
        }
        choices
            .into_iter()
            .multi_cartesian_product()
            .map(|pairs| pairs.into_iter().collect())
            .collect()
    }

    pub fn assignments(&self) -> Vec<Assignment> {
        self.assignments_with_names(&FORMAL_NAMES)
    }
}

fn check_orders(orders: &[u64]) -> std::result::Result<(), String> {
    match orders.iter().find(|r| !ROOT_ORDERS.contains(r)) {
        Some(r) => Err(format!("unexpected root-of-unity order {r}")),
        None if orders.is_empty() => Err("empty order list".into()),
        None => Ok(()),
    }
}

/// Parses a table document (a JSON array of rows).
pub fn parse_table(src: &str) -> Result<Vec<CatalogRow>> {
    let rows: Vec<CatalogRow> =
        serde_json::from_str(src).map_err(|e| Error::InvalidMatrix(format!("catalog: {e}")))?;
    for row in &rows {
        row.validate()?;
    }
    Ok(rows)
}

/// The built-in sixteen-row table, in its published order.
pub fn builtin() -> &'static [CatalogRow] {
    static TABLE: OnceLock<Vec<CatalogRow>> = OnceLock::new();
    TABLE.get_or_init(|| parse_table(TABLE_JSON).expect("built-in table is valid"))
}

pub fn row(row_id: u32) -> Option<&'static CatalogRow> {
    builtin().iter().find(|r| r.row_id == row_id)
}

/// The set of twist classes of one row under one fixed-parameter choice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowInstantiation {
    pub row_id: u32,
    pub assignment: Assignment,
    pub class_set: BTreeSet<TwistClass>,
}

impl RowInstantiation {
    /// Formal parameter names used by the classes.
    pub fn universe(&self) -> BTreeSet<String> {
        self.class_set.iter().flat_map(|c| c.parameters()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RowVerdict {
    Pass,
    Fail {
        /// Classes reached by reflections but missing from the row.
        outside_row: Vec<TwistClass>,
        /// Row classes that the orbit never reached.
        unreached: Vec<TwistClass>,
        /// `(orbit node, zero-based vertex)` pairs where no reflection exists.
        dead_ends: Vec<(usize, usize)>,
    },
    Inconclusive,
}

impl RowVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, RowVerdict::Pass)
    }

    pub fn label(&self) -> &'static str {
        match self {
            RowVerdict::Pass => "PASS",
            RowVerdict::Fail { .. } => "FAIL",
            RowVerdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstantiationReport {
    pub row_id: u32,
    pub assignment: Assignment,
    pub class_count: usize,
    pub orbit_size: usize,
    pub verdict: RowVerdict,
}

/// Checks one instantiation: the orbit of a member must close, contain no
/// dead ends, and have exactly the row's classes as nodes.
pub fn verify_instantiation(inst: &RowInstantiation, bound: usize) -> InstantiationReport {
    let start = inst.class_set.first().expect("rows have at least one form");
    let orbit = enumerate_orbit(&rep_matrix(start), bound);
    let verdict = if !orbit.is_complete() {
        RowVerdict::Inconclusive
    } else {
        let nodes = orbit.classes();
        let outside_row: Vec<_> = nodes.difference(&inst.class_set).cloned().collect();
        let unreached: Vec<_> = inst.class_set.difference(&nodes).cloned().collect();
        let dead_ends: Vec<_> = orbit.dead_ends.iter().map(|d| (d.node, d.vertex)).collect();
        if outside_row.is_empty() && unreached.is_empty() && dead_ends.is_empty() {
            RowVerdict::Pass
        } else {
            RowVerdict::Fail {
                outside_row,
                unreached,
                dead_ends,
            }
        }
    };
    InstantiationReport {
        row_id: inst.row_id,
        assignment: inst.assignment.clone(),
        class_count: inst.class_set.len(),
        orbit_size: orbit.nodes.len(),
        verdict,
    }
}

pub fn verify_row(
    row: &CatalogRow,
    assignment: &Assignment,
    bound: usize,
) -> Result<InstantiationReport> {
    Ok(verify_instantiation(&row.instantiate(assignment)?, bound))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowSummary {
    pub row_id: u32,
    pub trees: Vec<String>,
    pub instantiations: usize,
    pub verdict: &'static str,
}

/// How two instantiations of the same row relate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConjugateRelations {
    pub identical: usize,
    pub disjoint: usize,
    pub partial: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DisjointnessReport {
    /// Pairs of instantiations from different rows over the same parameters.
    pub pairs_tested: usize,
    /// Offending pairs as indices into the instantiation list.
    pub overlaps: Vec<(usize, usize)>,
    /// Recorded only: pairs from the same row with different assignments.
    pub same_row: ConjugateRelations,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub bound: usize,
    pub rows: Vec<RowSummary>,
    pub instantiations: Vec<InstantiationReport>,
    pub disjointness: DisjointnessReport,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == "PASS") && self.disjointness.overlaps.is_empty()
    }

    pub fn any_fail(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == "FAIL") || !self.disjointness.overlaps.is_empty()
    }
}

/// Verifies `rows` (all rows when `None`) under every admissible assignment,
/// then checks cross-row disjointness among the instantiations.
pub fn verify_all(bound: usize, rows: Option<&BTreeSet<u32>>) -> VerificationReport {
    verify_table(builtin(), bound, rows)
}

pub fn verify_table(
    table: &[CatalogRow],
    bound: usize,
    rows: Option<&BTreeSet<u32>>,
) -> VerificationReport {
    let mut instantiations = Vec::new();
    let mut reports = Vec::new();
    let mut summaries = Vec::new();
    for row in table
        .iter()
        .filter(|r| rows.is_none_or(|f| f.contains(&r.row_id)))
    {
        let mut verdicts = Vec::new();
        for assignment in row.assignments() {
            let inst = row
                .instantiate(&assignment)
                .expect("generated assignments are admissible");
            let report = verify_instantiation(&inst, bound);
            verdicts.push(report.verdict.label());
            reports.push(report);
            instantiations.push(inst);
        }
        let verdict = if verdicts.contains(&"FAIL") {
            "FAIL"
        } else if verdicts.contains(&"INCONCLUSIVE") {
            "INCONCLUSIVE"
        } else {
            "PASS"
        };
        summaries.push(RowSummary {
            row_id: row.row_id,
            trees: row.trees().into_iter().map(String::from).collect(),
            instantiations: verdicts.len(),
            verdict,
        });
    }
    VerificationReport {
        bound,
        rows: summaries,
        disjointness: check_disjointness(&instantiations),
        instantiations: reports,
    }
}

pub fn check_disjointness(insts: &[RowInstantiation]) -> DisjointnessReport {
    let universes: Vec<_> = insts.iter().map(RowInstantiation::universe).collect();
    let mut report = DisjointnessReport::default();
    for (a, b) in (0..insts.len()).tuple_combinations() {
        if universes[a] != universes[b] {
            continue;
        }
        let shared = insts[a].class_set.intersection(&insts[b].class_set).count();
        if insts[a].row_id == insts[b].row_id {
            if insts[a].class_set == insts[b].class_set {
                report.same_row.identical += 1;
            } else if shared == 0 {
                report.same_row.disjoint += 1;
            } else {
                report.same_row.partial += 1;
            }
        } else {
            report.pairs_tested += 1;
            if shared > 0 {
                report.overlaps.push((a, b));
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Classification {
    Match {
        row_id: u32,
        assignment: Assignment,
        /// Zero-based index of the form whose class lies in the orbit.
        form: usize,
        free_value: Option<Scalar>,
    },
    NoMatch,
    Inconclusive,
}

/// Finds the first row whose instantiation meets the orbit of `m`.
///
/// Root-of-unity symbols range over all primitive roots of the listed
/// orders. Transcendental symbols are solved for: each is matched to a
/// monomial of infinite order in the parameter of `m`.
pub fn classify(m: &BraidingMatrix, bound: usize) -> Result<Classification> {
    if m.rank() != 2 {
        return Err(Error::RankMismatch {
            left: m.rank(),
            right: 2,
        });
    }
    let params = m.parameters();
    if params.len() > 1 {
        return Err(Error::DomainViolation(format!(
            "at most one formal parameter is supported, found {}",
            params.join(", ")
        )));
    }
    let orbit = enumerate_orbit(m, bound);
    let nodes = orbit.classes();
    for row in builtin() {
        if let Some(found) = classify_in_row(row, &nodes) {
            return Ok(found);
        }
    }
    Ok(if orbit.is_complete() {
        Classification::NoMatch
    } else {
        Classification::Inconclusive
    })
}

const UNKNOWN_PREFIX: &str = "__unknown_";

fn classify_in_row(row: &CatalogRow, nodes: &BTreeSet<TwistClass>) -> Option<Classification> {
    let root_choices: Vec<Vec<(String, Scalar)>> = row
        .fixed
        .iter()
        .filter_map(|p| match &p.domain {
            Domain::RootsOfUnity(orders) => Some(
                orders
                    .iter()
                    .flat_map(|&r| Scalar::primitive_roots(r))
                    .map(|v| (p.symbol.clone(), v))
                    .collect(),
            ),
            Domain::Transcendental { .. } => None,
        })
        .collect();
    let unknowns: Vec<&str> = row
        .fixed
        .iter()
        .filter(|p| matches!(p.domain, Domain::Transcendental { .. }))
        .map(|p| p.symbol.as_str())
        .collect();
    // route unknown symbols through reserved names so they cannot collide
    // with the parameter of the input matrix
    let renaming: Assignment = unknowns
        .iter()
        .map(|s| {
            (
                s.to_string(),
                Scalar::param(&format!("{UNKNOWN_PREFIX}{s}")),
            )
        })
        .collect();
    let hidden: Vec<String> = unknowns
        .iter()
        .map(|s| format!("{UNKNOWN_PREFIX}{s}"))
        .collect();

    let root_assignments: Vec<Assignment> = if root_choices.is_empty() {
        vec![Assignment::new()]
    } else {
        root_choices
            .into_iter()
            .multi_cartesian_product()
            .map(|pairs| pairs.into_iter().collect())
            .collect()
    };

    for roots in root_assignments {
        let mut partial = roots.clone();
        partial.extend(renaming.clone());
        for (k, free_value, form) in row.specialized_forms(&partial) {
            let t = form.substitute(&partial);
            for node in nodes {
                let (d, c) = (node.diagonal(), &node.products()[0]);
                for (a, b) in [(0, 1), (1, 0)] {
                    let eqs = [
                        (t.q11.clone(), d[a].clone()),
                        (t.q22.clone(), d[b].clone()),
                        (t.q21.clone(), c.clone()),
                    ];
                    for solution in solve_monomials(&eqs, &hidden, Assignment::new()) {
                        let mut assignment = roots.clone();
                        for s in &unknowns {
                            assignment.insert(
                                s.to_string(),
                                solution[&format!("{UNKNOWN_PREFIX}{s}")].clone(),
                            );
                        }
                        let Ok(inst) = row.instantiate(&assignment) else {
                            continue;
                        };
                        if inst.class_set.iter().any(|c| nodes.contains(c)) {
                            let free_value = free_value.map(|v| v.substitute_all(&solution));
                            return Some(Classification::Match {
                                row_id: row.row_id,
                                assignment,
                                form: k,
                                free_value,
                            });
                        }
                    }
                }
            }
        }
    }
    None
}

/// All assignments of the `unknowns` making every `template == target`.
///
/// Solves one equation at a time: an equation whose template involves a
/// single unresolved unknown `x` with exponent `k` forces `x^k = g`, which
/// has `|k|` solutions when the parameter exponents of `g` divide by `k`.
fn solve_monomials(
    eqs: &[(Scalar, Scalar)],
    unknowns: &[String],
    partial: Assignment,
) -> Vec<Assignment> {
    let open: Vec<&String> = unknowns
        .iter()
        .filter(|u| !partial.contains_key(*u))
        .collect();
    let reduced: Vec<(Scalar, &Scalar)> = eqs
        .iter()
        .map(|(t, g)| (t.substitute_all(&partial), g))
        .collect();
    if open.is_empty() {
        return if reduced.iter().all(|(t, g)| t == *g) {
            vec![partial]
        } else {
            Vec::new()
        };
    }
    let pick = reduced.iter().find_map(|(t, g)| {
        let present: Vec<&&String> = open.iter().filter(|u| t.exponent_of(u) != 0).collect();
        (present.len() == 1).then(|| ((*present[0]).clone(), t, *g))
    });
    let Some((name, template, target)) = pick else {
        return Vec::new();
    };
    let mut k = template.exponent_of(&name);
    let mut rhs = target.div(&template.substitute(&name, &Scalar::one()));
    if k < 0 {
        k = -k;
        rhs = rhs.inv();
    }
    let mut monomial = Scalar::one();
    for (p, e) in rhs.params() {
        if e % k != 0 {
            return Vec::new();
        }
        monomial = &monomial * &Scalar::param_pow(p, e / k);
    }
    let (num, den) = rhs.root_fraction();
    let mut out = Vec::new();
    for j in 0..k as u64 {
        let root = Scalar::root_of_unity((num + j * den) as i64, k as u64 * den);
        let mut next = partial.clone();
        next.insert(name.clone(), &root * &monomial);
        out.extend(solve_monomials(eqs, unknowns, next));
    }
    out
}
