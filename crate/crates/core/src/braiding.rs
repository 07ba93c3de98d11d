//! Braiding matrices of diagonal type and their reflections.
//!
//! A braided vector space of diagonal type with basis `x_1, ..., x_n` is
//! determined by the scalars `q_ij` in `c(x_i (x) x_j) = q_ij x_j (x) x_i`.
//! All indices in this module are zero-based.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::scalar::{Order, ParseError, Scalar};

/// Largest rank accepted; canonical forms enumerate all `n!` relabelings.
pub const MAX_RANK: usize = 8;

/// The matrix `(q_ij)` of a braided vector space of diagonal type.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "MatrixDocument", into = "MatrixDocument")]
pub struct BraidingMatrix {
    rank: usize,
    entries: Vec<Scalar>,
}

/// On-disk form: `{"rank": n, "entries": [n*n scalar literals, row-major]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rank: usize,
    pub entries: Vec<Scalar>,
}

impl TryFrom<MatrixDocument> for BraidingMatrix {
    type Error = Error;

    fn try_from(doc: MatrixDocument) -> Result<Self> {
        BraidingMatrix::new(doc.rank, doc.entries)
    }
}

impl From<BraidingMatrix> for MatrixDocument {
    fn from(m: BraidingMatrix) -> Self {
        MatrixDocument {
            rank: m.rank,
            entries: m.entries,
        }
    }
}

impl BraidingMatrix {
    pub fn new(rank: usize, entries: Vec<Scalar>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidMatrix("rank must be at least 1".into()));
        }
        if rank > MAX_RANK {
            return Err(Error::RankTooLarge(rank));
        }
        if entries.len() != rank * rank {
            return Err(Error::InvalidMatrix(format!(
                "rank {rank} needs {} entries, got {}",
                rank * rank,
                entries.len()
            )));
        }
        Ok(BraidingMatrix { rank, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let rank = rows.len();
        if rows.iter().any(|r| r.len() != rank) {
            return Err(Error::InvalidMatrix("rows must form a square".into()));
        }
        Self::new(rank, rows.into_iter().flatten().collect())
    }

    /// The rank 2 matrix with `q_12 = 1`, the normal form used in tables.
    pub fn rank2(q11: Scalar, q21: Scalar, q22: Scalar) -> Self {
        BraidingMatrix {
            rank: 2,
            entries: vec![q11, Scalar::one(), q21, q22],
        }
    }

    /// Parses the inline syntax `q11,q12;q21,q22` (rows separated by `;`).
    pub fn parse_inline(src: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut offset = 0;
        for row_src in src.split(';') {
            let mut row = Vec::new();
            let mut cell_offset = offset;
            for cell in row_src.split(',') {
                let value = cell
                    .parse::<Scalar>()
                    .map_err(|e: ParseError| e.offset(cell_offset))?;
                row.push(value);
                cell_offset += cell.len() + 1;
            }
            rows.push(row);
            offset += row_src.len() + 1;
        }
        Self::from_rows(rows)
    }

    /// Parses a JSON matrix document.
    pub fn from_json(src: &str) -> Result<Self> {
        let doc: MatrixDocument = serde_json::from_str(src).map_err(|e| {
            Error::Parse(ParseError {
                position: json_offset(src, e.line(), e.column()),
                message: e.to_string(),
            })
        })?;
        Self::try_from(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serializes")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.rank + j]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.entries.chunks(self.rank).map(|r| r.to_vec()).collect()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.rank {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                rank: self.rank,
            })
        }
    }

    /// `q_ij * q_ji`.
    pub fn product(&self, i: usize, j: usize) -> Scalar {
        self.get(i, j) * self.get(j, i)
    }

    /// Relabels the basis: entry `(k, l)` of the result is `q_{perm[k] perm[l]}`.
    pub fn permuted(&self, perm: &[usize]) -> BraidingMatrix {
        let n = self.rank;
        assert_eq!(perm.len(), n);
        let entries = (0..n)
            .flat_map(|k| (0..n).map(move |l| (k, l)))
            .map(|(k, l)| self.get(perm[k], perm[l]).clone())
            .collect();
        BraidingMatrix { rank: n, entries }
    }

    pub fn twist_invariants(&self) -> TwistInvariants {
        let n = self.rank;
        TwistInvariants {
            diagonal: (0..n).map(|i| self.get(i, i).clone()).collect(),
            products: (0..n)
                .tuple_combinations()
                .map(|(i, j)| self.product(i, j))
                .collect(),
        }
    }

    /// Names of all formal parameters occurring in the entries.
    pub fn parameters(&self) -> Vec<String> {
        self.entries
            .iter()
            .flat_map(|s| s.params().map(|(n, _)| n.to_string()))
            .sorted()
            .dedup()
            .collect()
    }
}

/// Maps a serde_json (line, column) pair to a byte offset.
fn json_offset(src: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let before: usize = src.split_inclusive('\n').take(line - 1).map(str::len).sum();
    before + column.saturating_sub(1)
}

impl fmt::Display for BraidingMatrix {
    /// Renders in the inline syntax accepted by [`BraidingMatrix::parse_inline`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(Scalar::to_string).join(", "))
            .collect();
        f.write_str(&rows.join("; "))
    }
}

impl FromStr for BraidingMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_inline(s)
    }
}

/// Smallest `m >= 0` with `(m+1)_q = 0` or `q^m * c = 1`, where `q = q_ii` and
/// `c = q_ij q_ji`.
///
/// The second condition is solved exactly: every formal parameter gives the
/// linear constraint `m * e_q + e_c = 0`, which pins `m` as soon as `q`
/// carries any parameter. Otherwise both sides are roots of unity and the
/// congruence is periodic in `m` with period `ord(q)`.
pub fn solve_m(q: &Scalar, c: &Scalar) -> Option<u32> {
    let branch_root = match q.multiplicative_order() {
        Order::Finite(r) if r >= 2 => Some(r - 1),
        _ => None,
    };
    let branch_unit = solve_unit_branch(q, c);
    let m = match (branch_root, branch_unit) {
        (Some(a), Some(b)) => a.min(b),
        (a, b) => a.or(b)?,
    };
    u32::try_from(m).ok()
}

fn solve_unit_branch(q: &Scalar, c: &Scalar) -> Option<u64> {
    let names: Vec<&str> = q
        .params()
        .chain(c.params())
        .map(|(n, _)| n)
        .sorted()
        .dedup()
        .collect();
    let mut pinned: Option<i64> = None;
    for name in names {
        let (a, b) = (q.exponent_of(name), c.exponent_of(name));
        if a == 0 {
            // b != 0 here, so no power of q can cancel it
            return None;
        }
        if b % a != 0 {
            return None;
        }
        let m = -b / a;
        if m < 0 || pinned.is_some_and(|p| p != m) {
            return None;
        }
        pinned = Some(m);
    }
    match pinned {
        Some(m) => (q.pow(m) * c.clone()).is_one().then_some(m as u64),
        None => {
            let period = q.root_fraction().1;
            (0..period).find(|&m| (q.pow(m as i64) * c.clone()).is_one())
        }
    }
}

/// `m_ij` for `i != j`; `Ok(None)` when no such `m` exists.
pub fn m_exponent(m: &BraidingMatrix, i: usize, j: usize) -> Result<Option<u32>> {
    m.check_index(i)?;
    m.check_index(j)?;
    if i == j {
        return Err(Error::DiagonalQuery(i));
    }
    Ok(solve_m(m.get(i, i), &m.product(i, j)))
}

fn p_from(q: &Scalar, c: &Scalar, m: u32) -> Scalar {
    if (q.pow(m as i64) * c.clone()).is_one() {
        Scalar::one()
    } else {
        q.inv() * c.clone()
    }
}

/// `p_ij`: `1` if `q_ii^{m_ij} q_ij q_ji = 1`, else `q_ii^{-1} q_ij q_ji`.
pub fn p_factor(m: &BraidingMatrix, i: usize, j: usize) -> Result<Scalar> {
    let mij = m_exponent(m, i, j)?.ok_or(Error::NotReflectable(i))?;
    Ok(p_from(m.get(i, i), &m.product(i, j), mij))
}

/// The pseudo-reflection at a vertex together with the reflected braiding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReflectionData {
    pub vertex: usize,
    /// `m_ij` for all `j`, with `m_ii = -2`.
    pub m_row: Vec<i64>,
    /// Column `j` is `s_i(e_j)`.
    pub s_matrix: IntMatrix,
    /// `p_ij` for `j != i`; `None` at `j = i`.
    pub p_row: Vec<Option<Scalar>>,
    pub reflected: BraidingMatrix,
}

/// All `m_ij` for `j != i`, or `NotReflectable(i)`. The entry at `i` is `-2`.
pub fn m_row(m: &BraidingMatrix, i: usize) -> Result<Vec<i64>> {
    m.check_index(i)?;
    (0..m.rank())
        .map(|j| {
            if j == i {
                Ok(-2)
            } else {
                m_exponent(m, i, j)?
                    .map(i64::from)
                    .ok_or(Error::NotReflectable(i))
            }
        })
        .collect()
}

/// `e_i -> -e_i`, `e_j -> e_j + m_ij e_i`.
pub fn reflection_matrix(m_row: &[i64], i: usize) -> IntMatrix {
    let n = m_row.len();
    let mut s = IntMatrix::identity(n);
    for j in 0..n {
        s[(i, j)] = if j == i { -1 } else { m_row[j] };
    }
    s
}

/// Reflects at vertex `i`.
///
/// The reflected matrix is `q'_jl = q_ii^{m_ij m_il} q_il^{m_ij} q_ji^{m_il} q_jl`
/// over all pairs, with `m_ii = -2`; this is the bicharacter evaluated on the
/// reflected basis.
pub fn reflect(m: &BraidingMatrix, i: usize) -> Result<ReflectionData> {
    let row = m_row(m, i)?;
    let n = m.rank();
    let qii = m.get(i, i);
    let entries = (0..n)
        .cartesian_product(0..n)
        .map(|(j, l)| {
            let (mj, ml) = (row[j], row[l]);
            [
                qii.pow(mj * ml),
                m.get(i, l).pow(mj),
                m.get(j, i).pow(ml),
                m.get(j, l).clone(),
            ]
            .into_iter()
            .product()
        })
        .collect();
    let p_row = (0..n)
        .map(|j| (j != i).then(|| p_from(qii, &m.product(i, j), row[j] as u32)))
        .collect();
    Ok(ReflectionData {
        vertex: i,
        s_matrix: reflection_matrix(&row, i),
        m_row: row,
        p_row,
        reflected: BraidingMatrix { rank: n, entries },
    })
}

/// Twist invariants of `reflect(m, i).reflected`, predicted from the
/// `p_ij` factors alone:
/// `q'_ii = q_ii`, `q'_jj = p_ij^{m_ij} q_jj`, `q'_ij q'_ji = p_ij^{-2} q_ij q_ji`,
/// `q'_jl q'_lj = p_ij^{m_il} p_il^{m_ij} q_jl q_lj`.
pub fn predicted_invariants(m: &BraidingMatrix, i: usize) -> Result<TwistInvariants> {
    let row = m_row(m, i)?;
    let n = m.rank();
    let p: Vec<Scalar> = (0..n)
        .map(|j| {
            if j == i {
                Scalar::one()
            } else {
                p_from(m.get(i, i), &m.product(i, j), row[j] as u32)
            }
        })
        .collect();
    let diagonal = (0..n)
        .map(|j| {
            if j == i {
                m.get(i, i).clone()
            } else {
                &p[j].pow(row[j]) * m.get(j, j)
            }
        })
        .collect();
    let products = (0..n)
        .tuple_combinations()
        .map(|(j, l)| {
            if j == i {
                &p[l].pow(-2) * &m.product(j, l)
            } else if l == i {
                &p[j].pow(-2) * &m.product(j, l)
            } else {
                [p[j].pow(row[l]), p[l].pow(row[j]), m.product(j, l)]
                    .into_iter()
                    .product()
            }
        })
        .collect();
    Ok(TwistInvariants { diagonal, products })
}

/// Diagonal entries and the products `q_ij q_ji` (`i < j`, lexicographic).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct TwistInvariants {
    pub diagonal: Vec<Scalar>,
    pub products: Vec<Scalar>,
}

impl TwistInvariants {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// `q_jl q_lj` for `j != l`.
    pub fn product(&self, j: usize, l: usize) -> &Scalar {
        let (a, b) = if j < l { (j, l) } else { (l, j) };
        &self.products[pair_index(self.rank(), a, b)]
    }

    fn permuted(&self, perm: &[usize]) -> TwistInvariants {
        let n = self.rank();
        TwistInvariants {
            diagonal: perm.iter().map(|&k| self.diagonal[k].clone()).collect(),
            products: (0..n)
                .tuple_combinations()
                .map(|(a, b)| self.product(perm[a], perm[b]).clone())
                .collect(),
        }
    }

    /// Minimal relabeling and the permutation realizing it.
    pub fn canonical(&self) -> (TwistClass, Vec<usize>) {
        let n = self.rank();
        let mut best: Option<(TwistInvariants, Vec<usize>)> = None;
        for perm in (0..n).permutations(n) {
            let cand = self.permuted(&perm);
            if best.as_ref().is_none_or(|(b, _)| cand < *b) {
                best = Some((cand, perm));
            }
        }
        let (inv, perm) = best.expect("at least one permutation");
        (TwistClass(inv), perm)
    }
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Canonical representative of a twist-equivalence class.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
#[serde(transparent)]
pub struct TwistClass(TwistInvariants);

impl TwistClass {
    pub fn rank(&self) -> usize {
        self.0.rank()
    }

    pub fn diagonal(&self) -> &[Scalar] {
        &self.0.diagonal
    }

    pub fn products(&self) -> &[Scalar] {
        &self.0.products
    }

    pub fn invariants(&self) -> &TwistInvariants {
        &self.0
    }

    /// Formal parameter names occurring anywhere in the class.
    pub fn parameters(&self) -> Vec<String> {
        self.0
            .diagonal
            .iter()
            .chain(&self.0.products)
            .flat_map(|s| s.params().map(|(n, _)| n.to_string()))
            .sorted()
            .dedup()
            .collect()
    }
}

impl fmt::Display for TwistClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "diag({}) prod({})",
            self.0.diagonal.iter().join(", "),
            self.0.products.iter().join(", ")
        )
    }
}

pub fn canonicalize(m: &BraidingMatrix) -> TwistClass {
    m.twist_invariants().canonical().0
}

/// Canonical class and the relabeling `perm`: position `k` of the canonical
/// form holds original vertex `perm[k]`.
pub fn canonicalize_with_permutation(m: &BraidingMatrix) -> (TwistClass, Vec<usize>) {
    m.twist_invariants().canonical()
}

/// The representative with `q_ij = 1` for `i < j`.
pub fn rep_matrix(c: &TwistClass) -> BraidingMatrix {
    let n = c.rank();
    let entries = (0..n)
        .cartesian_product(0..n)
        .map(|(i, j)| match i.cmp(&j) {
            std::cmp::Ordering::Equal => c.diagonal()[i].clone(),
            std::cmp::Ordering::Less => Scalar::one(),
            std::cmp::Ordering::Greater => c.invariants().product(i, j).clone(),
        })
        .collect();
    BraidingMatrix { rank: n, entries }
}

/// Generalized Cartan matrix `a_ii = 2`, `a_ij = -m_ij`.
pub fn cartan_matrix(m: &BraidingMatrix) -> Result<IntMatrix> {
    let n = m.rank();
    let mut a = IntMatrix::zero(n);
    for i in 0..n {
        let row = m_row(m, i)?;
        for j in 0..n {
            a[(i, j)] = if i == j { 2 } else { -row[j] };
        }
    }
    Ok(a)
}

/// `chi(d, e) = prod_{i,j} q_ij^{d_i e_j}`.
pub fn bicharacter_eval(m: &BraidingMatrix, d: &[i64], e: &[i64]) -> Result<Scalar> {
    for v in [d, e] {
        if v.len() != m.rank() {
            return Err(Error::DimensionMismatch {
                expected: m.rank(),
                found: v.len(),
            });
        }
    }
    Ok((0..m.rank())
        .cartesian_product(0..m.rank())
        .filter(|&(i, j)| d[i] * e[j] != 0)
        .map(|(i, j)| m.get(i, j).pow(d[i] * e[j]))
        .product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(src: &str) -> Scalar {
        src.parse().unwrap()
    }

    fn mat(src: &str) -> BraidingMatrix {
        BraidingMatrix::parse_inline(src).unwrap()
    }

    fn class(diag: &[&str], prods: &[&str]) -> TwistClass {
        TwistClass(TwistInvariants {
            diagonal: diag.iter().map(|x| s(x)).collect(),
            products: prods.iter().map(|x| s(x)).collect(),
        })
    }

    /// Direct evaluation of both branch conditions for m = 0, 1, 2, ...
    fn brute_force_m(q: &Scalar, c: &Scalar, limit: u32) -> Option<u32> {
        (0..=limit)
            .find(|&m| q.qint_is_zero(m as u64 + 1) || (q.pow(m as i64) * c.clone()).is_one())
    }

    #[test]
    fn m_exponent_examples() {
        assert_eq!(m_exponent(&mat("t,1;t^-1,t"), 0, 1), Ok(Some(1)));
        assert_eq!(m_exponent(&mat("1,1;t,t"), 0, 1), Ok(None));
        assert_eq!(m_exponent(&mat("u(1/2),1;t,t"), 0, 1), Ok(Some(1)));
        assert_eq!(brute_force_m(&s("u(1/2)"), &s("t"), 200), Some(1));
        assert_eq!(
            m_exponent(&mat("t,1;t,t"), 0, 0),
            Err(Error::DiagonalQuery(0))
        );
        assert_eq!(
            m_exponent(&mat("t,1;t,t"), 0, 2),
            Err(Error::IndexOutOfRange { index: 2, rank: 2 })
        );
    }

    #[test]
    fn m_exponent_pins_by_parameters() {
        assert_eq!(solve_m(&s("t^2"), &s("t^-6")), Some(3));
        assert_eq!(solve_m(&s("t^2"), &s("t^-5")), None);
        assert_eq!(solve_m(&s("t^2"), &s("t^6")), None);
        assert_eq!(solve_m(&s("u(1/4)*t"), &s("t^-1")), None);
        assert_eq!(solve_m(&s("u(1/4)*t"), &s("u(3/4)*t^-1")), Some(1));
        assert_eq!(solve_m(&s("u(1/5)*t"), &s("s")), None);
        // q of order 5 without branch 1 falls back to ord - 1
        assert_eq!(solve_m(&s("u(1/5)"), &s("t")), Some(4));
        assert_eq!(solve_m(&s("u(1/5)"), &s("u(3/5)")), Some(2));
        assert_eq!(solve_m(&s("1"), &s("1")), Some(0));
    }

    #[test]
    fn p_factor_examples() {
        assert_eq!(p_factor(&mat("t,1;t^-1,t"), 0, 1), Ok(Scalar::one()));
        assert_eq!(p_factor(&mat("t,1;t^-1,-1"), 1, 0), Ok(s("-t^-1")));
        assert_eq!(p_factor(&mat("-1,1;1,t"), 0, 1), Ok(Scalar::one()));
        assert_eq!(
            p_factor(&mat("1,1;t,t"), 0, 1),
            Err(Error::NotReflectable(0))
        );
    }

    #[test]
    fn reflect_row3_transcendental() {
        let r = reflect(&mat("t,1;t^-1,-1"), 1).unwrap();
        assert_eq!(r.m_row, vec![1, -2]);
        assert_eq!(
            r.s_matrix,
            IntMatrix::from_rows(&[vec![1, 0], vec![1, -1]]).unwrap()
        );
        assert_eq!(canonicalize(&r.reflected), class(&["-1", "-1"], &["t"]));
        assert_eq!(r.reflected, mat("-1,-1;-t,-1"));
    }

    #[test]
    fn reflect_cartan_a2_fixes_class() {
        let m = mat("t,1;t^-1,t");
        let r = reflect(&m, 0).unwrap();
        assert_eq!(r.reflected.product(0, 1), s("t^-1"));
        assert_eq!(r.reflected.get(1, 1), &s("t"));
        assert_eq!(canonicalize(&r.reflected), canonicalize(&m));
        assert_eq!(
            predicted_invariants(&m, 0).unwrap(),
            r.reflected.twist_invariants()
        );
    }

    #[test]
    fn reflect_trivial_braiding() {
        let m = mat("a,1;1,b");
        let r = reflect(&m, 0).unwrap();
        assert_eq!(r.m_row, vec![-2, 0]);
        assert_eq!(
            r.s_matrix,
            IntMatrix::from_rows(&[vec![-1, 0], vec![0, 1]]).unwrap()
        );
        assert_eq!(canonicalize(&r.reflected), canonicalize(&m));
    }

    #[test]
    fn reflect_row5_free_parameter() {
        let m = mat("t,1;t^-2,-1");
        let r = reflect(&m, 1).unwrap();
        assert_eq!(r.p_row[0], Some(s("-t^-2")));
        let inv = r.reflected.twist_invariants();
        assert_eq!(inv.diagonal, vec![s("-t^-1"), s("-1")]);
        assert_eq!(inv.products, vec![s("t^2")]);
        assert_eq!(
            canonicalize(&r.reflected),
            class(&["-1", "-t^-1"], &["t^2"])
        );
    }

    #[test]
    fn rank_one_reflection() {
        let m = mat("t");
        let r = reflect(&m, 0).unwrap();
        assert_eq!(r.s_matrix, IntMatrix::from_rows(&[vec![-1]]).unwrap());
        assert_eq!(r.reflected, m);
        assert_eq!(
            cartan_matrix(&m).unwrap(),
            IntMatrix::from_rows(&[vec![2]]).unwrap()
        );
    }

    #[test]
    fn not_reflectable() {
        assert_eq!(
            reflect(&mat("t,1;t^2,t^3"), 0).unwrap_err(),
            Error::NotReflectable(0)
        );
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(
            canonicalize(&mat("t,s;s^-1*t^-1,t")),
            class(&["t", "t"], &["t^-1"])
        );
        assert_eq!(
            canonicalize(&mat("-1,1;t,t")),
            canonicalize(&mat("t,1;t,-1"))
        );
        assert_eq!(
            canonicalize(&mat("u(1/3),1;u(2/3),u(1/3)")),
            class(&["u(1/3)", "u(1/3)"], &["u(2/3)"])
        );
    }

    #[test]
    fn canonical_permutation_relabels() {
        let m = mat("-1,1;t,t");
        let (c, perm) = canonicalize_with_permutation(&m);
        assert_eq!(perm, vec![1, 0]);
        assert_eq!(m.permuted(&perm).twist_invariants(), *c.invariants());
    }

    #[test]
    fn rep_matrix_examples() {
        assert_eq!(
            rep_matrix(&class(&["t", "t"], &["t^-1"])),
            mat("t,1;t^-1,t")
        );
        assert_eq!(rep_matrix(&class(&["t"], &[])), mat("t"));
        assert_eq!(rep_matrix(&class(&["-1", "-1"], &["t"])), mat("-1,1;t,-1"));
    }

    #[test]
    fn cartan_examples() {
        let cm = |rows: &[[i64; 2]; 2]| {
            IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
        };
        assert_eq!(
            cartan_matrix(&mat("t,1;t^-1,t")).unwrap(),
            cm(&[[2, -1], [-1, 2]])
        );
        assert_eq!(
            cartan_matrix(&mat("t,1;t^-2,t^2")).unwrap(),
            cm(&[[2, -2], [-1, 2]])
        );
        assert_eq!(
            cartan_matrix(&mat("t,1;t^-3,t^3")).unwrap(),
            cm(&[[2, -3], [-1, 2]])
        );
        // the brute-force search agrees on all three
        for (q, c, want) in [
            ("t", "t^-1", 1),
            ("t", "t^-2", 2),
            ("t^2", "t^-2", 1),
            ("t", "t^-3", 3),
        ] {
            assert_eq!(brute_force_m(&s(q), &s(c), 200), Some(want));
        }
        assert_eq!(
            cartan_matrix(&mat("1,1;t,t")),
            Err(Error::NotReflectable(0))
        );
    }

    #[test]
    fn bicharacter_examples() {
        let m = mat("t,a;b,u(1/3)");
        assert_eq!(bicharacter_eval(&m, &[1, 0], &[0, 1]).unwrap(), s("a"));
        assert_eq!(
            bicharacter_eval(&m, &[3, -2], &[0, 0]).unwrap(),
            Scalar::one()
        );
        assert_eq!(
            bicharacter_eval(&mat("t,1;t^-1,t"), &[1, 1], &[1, 1]).unwrap(),
            s("t")
        );
        assert_eq!(
            bicharacter_eval(&m, &[1], &[1, 1]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn reflected_matrix_is_bicharacter_on_new_basis() {
        let m = mat("t,a;u(3/4)*a^-1*t^-2,u(1/4)*t^2");
        let r = reflect(&m, 1).unwrap();
        for j in 0..2 {
            for l in 0..2 {
                let chi =
                    bicharacter_eval(&m, &r.s_matrix.column(j), &r.s_matrix.column(l)).unwrap();
                assert_eq!(&chi, r.reflected.get(j, l));
            }
        }
    }

    #[test]
    fn inline_and_json_parsing() {
        let m = mat("t, 1; t^-1, u(1/2)");
        assert_eq!(m.to_string(), "t, 1; t^-1, u(1/2)");
        assert_eq!(BraidingMatrix::parse_inline(&m.to_string()).unwrap(), m);
        assert_eq!(BraidingMatrix::from_json(&m.to_json()).unwrap(), m);
        let doc = r#"{"rank": 2, "entries": ["t", "1", "t^-1", "-1"]}"#;
        assert_eq!(BraidingMatrix::from_json(doc).unwrap(), m);
        match BraidingMatrix::parse_inline("t,1;t^-1,2") {
            Err(Error::Parse(e)) => assert_eq!(e.position, 9),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            BraidingMatrix::parse_inline("t,1;t"),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            BraidingMatrix::from_json(r#"{"rank": 2, "entries": ["t"]}"#),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(
            BraidingMatrix::from_json(r#"{"rank": 1, "entries": ["3"]}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn rank_guard() {
        let big = vec![Scalar::one(); 81];
        assert_eq!(BraidingMatrix::new(9, big), Err(Error::RankTooLarge(9)));
    }

    fn arb_entry() -> impl Strategy<Value = Scalar> {
        (0i64..30, 1u64..=30, -2i64..=2)
            .prop_map(|(p, r, e)| &Scalar::root_of_unity(p, r) * &Scalar::param_pow("t", e))
    }

    fn arb_matrix() -> impl Strategy<Value = BraidingMatrix> {
        (2usize..=3).prop_flat_map(|n| {
            proptest::collection::vec(arb_entry(), n * n)
                .prop_map(move |e| BraidingMatrix::new(n, e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn m_is_minimal(q in arb_entry(), c in arb_entry()) {
            let got = solve_m(&q, &c);
            match got {
                Some(m) => prop_assert_eq!(brute_force_m(&q, &c, m), Some(m)),
                None => prop_assert_eq!(brute_force_m(&q, &c, 200), None),
            }
        }

        #[test]
        fn double_reflection_is_identity(m in arb_matrix(), i in 0usize..3) {
            let i = i % m.rank();
            if let Ok(r) = reflect(&m, i) {
                let back = reflect(&r.reflected, i).unwrap();
                prop_assert_eq!(&back.reflected, &m);
                prop_assert_eq!(&back.s_matrix, &r.s_matrix);
                let id = IntMatrix::identity(m.rank());
                prop_assert_eq!(r.s_matrix.mul(&r.s_matrix), id.clone());
                prop_assert_eq!(r.s_matrix.det(), -1);
                prop_assert_eq!(r.s_matrix.sub(&id).rank(), 1);
            }
        }

        #[test]
        fn p_formula_matches_direct_formula(m in arb_matrix(), i in 0usize..3) {
            let i = i % m.rank();
            if let Ok(r) = reflect(&m, i) {
                prop_assert_eq!(predicted_invariants(&m, i).unwrap(), r.reflected.twist_invariants());
                prop_assert_eq!(r.reflected.get(i, i), m.get(i, i));
            }
        }

        #[test]
        fn twisting_changes_nothing(m in arb_matrix(), c in arb_entry(), i in 0usize..3) {
            let i = i % m.rank();
            let j = (i + 1) % m.rank();
            let mut entries = m.entries().to_vec();
            let n = m.rank();
            entries[i * n + j] = &entries[i * n + j] * &c;
            entries[j * n + i] = &entries[j * n + i] * &c.inv();
            let twisted = BraidingMatrix::new(n, entries).unwrap();
            prop_assert_eq!(canonicalize(&twisted), canonicalize(&m));
            for a in 0..n {
                for b in (0..n).filter(|&b| b != a) {
                    prop_assert_eq!(m_exponent(&twisted, a, b), m_exponent(&m, a, b));
                    prop_assert_eq!(p_factor(&twisted, a, b), p_factor(&m, a, b));
                }
                let lhs = reflect(&twisted, a).map(|r| canonicalize(&r.reflected));
                let rhs = reflect(&m, a).map(|r| canonicalize(&r.reflected));
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn rep_matrix_round_trips(m in arb_matrix()) {
            let c = canonicalize(&m);
            prop_assert_eq!(canonicalize(&rep_matrix(&c)), c);
        }
    }
}
