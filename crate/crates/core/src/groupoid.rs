//! The Weyl-Brandt groupoid: orbits of twist classes under reflections,
//! Weyl equivalence, the partial composition of groupoid elements, and the
//! real roots obtained by tracking bases of `Z^n`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::braiding::{
    canonicalize_with_permutation, reflect, rep_matrix, BraidingMatrix, TwistClass,
};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::scalar::Order;

pub const DEFAULT_BOUND: usize = 1000;

/// A pair `(s, E)`: an automorphism of `Z^n` and the ordered basis it starts from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupoidElement {
    s: IntMatrix,
    source: IntMatrix,
}

impl GroupoidElement {
    pub fn new(s: IntMatrix, source: IntMatrix) -> Result<Self> {
        if s.dim() != source.dim() {
            return Err(Error::DimensionMismatch {
                expected: s.dim(),
                found: source.dim(),
            });
        }
        if !s.is_unimodular() {
            return Err(Error::NotUnimodular(s.to_string()));
        }
        if !source.is_unimodular() {
            return Err(Error::NotUnimodular(source.to_string()));
        }
        Ok(GroupoidElement { s, source })
    }

    /// `(id, E)`.
    pub fn identity(source: IntMatrix) -> Result<Self> {
        Self::new(IntMatrix::identity(source.dim()), source)
    }

    pub fn map(&self) -> &IntMatrix {
        &self.s
    }

    pub fn source(&self) -> &IntMatrix {
        &self.source
    }

    /// `s(E)`.
    pub fn target(&self) -> IntMatrix {
        self.s.mul(&self.source)
    }
}

/// `(s, E) o (t, F) = (st, F)`, defined when `t(F) = E`.
pub fn compose(g: &GroupoidElement, h: &GroupoidElement) -> Result<GroupoidElement> {
    if g.s.dim() != h.s.dim() || h.target() != g.source {
        return Err(Error::UndefinedComposition);
    }
    Ok(GroupoidElement {
        s: g.s.mul(&h.s),
        source: h.source.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitNode {
    pub index: usize,
    pub class: TwistClass,
    pub representative: BraidingMatrix,
}

/// Reflection at `vertex` of node `from` lands in node `to`.
///
/// `relabel[k]` is the vertex of the reflected matrix that sits at position
/// `k` of the target's canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitEdge {
    pub from: usize,
    pub vertex: usize,
    pub to: usize,
    pub s_matrix: IntMatrix,
    pub relabel: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitStatus {
    Complete,
    BoundExceeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DeadEnd {
    pub node: usize,
    pub vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitGraph {
    pub nodes: Vec<OrbitNode>,
    pub edges: Vec<OrbitEdge>,
    pub status: OrbitStatus,
    pub dead_ends: Vec<DeadEnd>,
}

impl OrbitGraph {
    pub fn is_complete(&self) -> bool {
        self.status == OrbitStatus::Complete
    }

    pub fn node_of(&self, class: &TwistClass) -> Option<usize> {
        self.nodes.iter().position(|n| &n.class == class)
    }

    pub fn contains(&self, class: &TwistClass) -> bool {
        self.node_of(class).is_some()
    }

    pub fn classes(&self) -> BTreeSet<TwistClass> {
        self.nodes.iter().map(|n| n.class.clone()).collect()
    }

    pub fn edge(&self, from: usize, vertex: usize) -> Option<&OrbitEdge> {
        self.edges
            .iter()
            .find(|e| e.from == from && e.vertex == vertex)
    }

    /// Graphviz rendering; vertices are labeled one-based.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph orbit {\n");
        for node in &self.nodes {
            out.push_str(&format!(
                "  n{} [label=\"{}\"];\n",
                node.index,
                node.class.to_string().replace('"', "\\\"")
            ));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  n{} -> n{} [label=\"s{}\"];\n",
                e.from,
                e.to,
                e.vertex + 1
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Breadth-first closure of the twist class of `m` under all reflections.
///
/// Nodes are numbered in discovery order; at each node the vertices are
/// tried in ascending order. Enumeration stops with `BoundExceeded` as soon
/// as a new class would make the node count exceed `bound` (a bound of 0
/// behaves like 1).
pub fn enumerate_orbit(m: &BraidingMatrix, bound: usize) -> OrbitGraph {
    let bound = bound.max(1);
    let start = canonicalize_with_permutation(m).0;
    let mut index: HashMap<TwistClass, usize> = HashMap::new();
    let mut graph = OrbitGraph {
        nodes: Vec::new(),
        edges: Vec::new(),
        status: OrbitStatus::Complete,
        dead_ends: Vec::new(),
    };
    index.insert(start.clone(), 0);
    graph.nodes.push(OrbitNode {
        index: 0,
        representative: rep_matrix(&start),
        class: start,
    });
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let rep = graph.nodes[k].representative.clone();
        for vertex in 0..rep.rank() {
            let data = match reflect(&rep, vertex) {
                Ok(d) => d,
                Err(_) => {
                    graph.dead_ends.push(DeadEnd { node: k, vertex });
                    continue;
                }
            };
            let (class, relabel) = canonicalize_with_permutation(&data.reflected);
            let to = match index.get(&class) {
                Some(&to) => to,
                None => {
                    if graph.nodes.len() >= bound {
                        graph.status = OrbitStatus::BoundExceeded;
                        return graph;
                    }
                    let to = graph.nodes.len();
                    index.insert(class.clone(), to);
                    graph.nodes.push(OrbitNode {
                        index: to,
                        representative: rep_matrix(&class),
                        class,
                    });
                    queue.push_back(to);
                    to
                }
            };
            graph.edges.push(OrbitEdge {
                from: k,
                vertex,
                to,
                s_matrix: data.s_matrix,
                relabel,
            });
        }
    }
    graph
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Equivalence {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

pub fn weyl_equivalent(
    a: &BraidingMatrix,
    b: &BraidingMatrix,
    bound: usize,
) -> Result<Equivalence> {
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch {
            left: a.rank(),
            right: b.rank(),
        });
    }
    let target = canonicalize_with_permutation(b).0;
    let orbit = enumerate_orbit(a, bound);
    Ok(if orbit.contains(&target) {
        Equivalence::Equivalent
    } else if orbit.is_complete() {
        Equivalence::NotEquivalent
    } else {
        Equivalence::Inconclusive
    })
}

/// An object reached at basis level: an ordered basis `E` of `Z^n` (columns)
/// and the braiding `chi(E_j, E_l)` of the module of degree `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisObject {
    pub basis: IntMatrix,
    pub braiding: BraidingMatrix,
}

/// All bases reachable from the standard basis by chains of reflections
/// `E -> E s_{i,E}`, in breadth-first order; `None` once more than `bound`
/// bases have been found.
pub fn reachable_bases(m: &BraidingMatrix, bound: usize) -> Option<Vec<BasisObject>> {
    let n = m.rank();
    let start = BasisObject {
        basis: IntMatrix::identity(n),
        braiding: m.clone(),
    };
    let mut seen: HashMap<IntMatrix, usize> = HashMap::from([(start.basis.clone(), 0)]);
    let mut objects = vec![start];
    let mut next = 0;
    while next < objects.len() {
        let current = objects[next].clone();
        next += 1;
        for vertex in 0..n {
            let Ok(data) = reflect(&current.braiding, vertex) else {
                continue;
            };
            let basis = current.basis.mul(&data.s_matrix);
            if seen.contains_key(&basis) {
                continue;
            }
            if objects.len() >= bound.max(1) {
                return None;
            }
            seen.insert(basis.clone(), objects.len());
            objects.push(BasisObject {
                basis,
                braiding: data.reflected,
            });
        }
    }
    Some(objects)
}

/// Truncation height of a root: `ord chi(d, d)` when it is finite and at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Height {
    Finite(u64),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealRoot {
    pub root: Vec<i64>,
    pub height: Height,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RealRoots {
    Complete(Vec<RealRoot>),
    Inconclusive,
}

/// Positive real roots: basis vectors with nonnegative coordinates over all
/// reachable bases, sorted by total degree and then lexicographically.
pub fn enumerate_real_roots(m: &BraidingMatrix, bound: usize) -> RealRoots {
    let Some(objects) = reachable_bases(m, bound) else {
        return RealRoots::Inconclusive;
    };
    let mut roots: BTreeSet<(i64, Vec<i64>)> = BTreeSet::new();
    for obj in &objects {
        for j in 0..m.rank() {
            let v = obj.basis.column(j);
            if v.iter().all(|&x| x >= 0) {
                roots.insert((v.iter().sum(), v));
            }
        }
    }
    RealRoots::Complete(
        roots
            .into_iter()
            .map(|(_, root)| {
                let chi = crate::braiding::bicharacter_eval(m, &root, &root)
                    .expect("root has matching length");
                let height = match chi.multiplicative_order() {
                    Order::Finite(r) if r >= 2 => Height::Finite(r),
                    _ => Height::Infinite,
                };
                RealRoot { root, height }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braiding::canonicalize;

    fn mat(src: &str) -> BraidingMatrix {
        BraidingMatrix::parse_inline(src).unwrap()
    }

    fn im(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn orbit_a2_is_a_single_class() {
        let g = enumerate_orbit(&mat("t,1;t^-1,t"), 64);
        assert_eq!(g.nodes.len(), 1);
        assert!(g.is_complete());
        assert_eq!(g.edges.len(), 2);
        assert!(g.edges.iter().all(|e| e.to == 0));
        assert!(g.dead_ends.is_empty());
    }

    #[test]
    fn orbit_of_row3_has_both_forms() {
        let g = enumerate_orbit(&mat("t,1;t^-1,-1"), 64);
        assert!(g.is_complete());
        let expected: BTreeSet<_> = [mat("t,1;t^-1,-1"), mat("-1,1;t,-1")]
            .iter()
            .map(canonicalize)
            .collect();
        assert_eq!(g.classes(), expected);
    }

    #[test]
    fn orbit_of_trivial_braiding() {
        let g = enumerate_orbit(&mat("a,1;1,b"), 64);
        assert!(g.is_complete());
        assert_eq!(g.nodes.len(), 1);
        assert!(g.to_dot().contains("n0 -> n0 [label=\"s1\"]"));
    }

    #[test]
    fn dead_ends_are_recorded() {
        let g = enumerate_orbit(&mat("t,1;t^-1,t^2"), 64);
        assert!(g.is_complete());
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(g.dead_ends, vec![DeadEnd { node: 0, vertex: 1 }]);
    }

    #[test]
    fn bound_is_respected() {
        let g = enumerate_orbit(&mat("t,1;t^-1,-1"), 1);
        assert_eq!(g.status, OrbitStatus::BoundExceeded);
        assert_eq!(g.nodes.len(), 1);
    }

    #[test]
    fn edges_come_in_reverse_pairs() {
        for src in [
            "t,1;t^-1,-1",
            "t,1;t^-2,-1",
            "u(1/3),1;u(5/6),-1",
            "u(1/30),1;u(-3/30),u(1/2)*u(5/30)",
        ] {
            let g = enumerate_orbit(&mat(src), 64);
            for e in &g.edges {
                assert!(
                    g.edges.iter().any(|r| r.from == e.to && r.to == e.from),
                    "{src}: no reverse for {e:?}"
                );
                assert_eq!(e.s_matrix.mul(&e.s_matrix), IntMatrix::identity(2));
                assert_eq!(e.s_matrix.det(), -1);
            }
        }
    }

    #[test]
    fn twist_invariance_of_orbits() {
        let a = mat("t,s;s^-1*t^-1,-1");
        let b = rep_matrix(&canonicalize(&a));
        assert_eq!(enumerate_orbit(&a, 64), enumerate_orbit(&b, 64));
    }

    #[test]
    fn weyl_equivalence_examples() {
        assert_eq!(
            weyl_equivalent(&mat("t,1;t^-1,-1"), &mat("-1,1;t,-1"), 64),
            Ok(Equivalence::Equivalent)
        );
        assert_eq!(
            weyl_equivalent(&mat("t,1;t^-1,t"), &mat("t,1;t^-2,t^2"), 64),
            Ok(Equivalence::NotEquivalent)
        );
        let a = mat("u(1/7),1;t,u(2/7)*s");
        assert_eq!(weyl_equivalent(&a, &a, 64), Ok(Equivalence::Equivalent));
        assert_eq!(
            weyl_equivalent(&mat("t"), &a, 64),
            Err(Error::RankMismatch { left: 1, right: 2 })
        );
        assert_eq!(
            weyl_equivalent(&mat("t,1;t^-1,-1"), &mat("-1,1;t,-1"), 1),
            Ok(Equivalence::Inconclusive)
        );
    }

    #[test]
    fn composition() {
        let e = im(&[&[1, 1], &[0, 1]]);
        let s = im(&[&[-1, 0], &[1, 1]]);
        let t = im(&[&[0, 1], &[1, 0]]);
        let f = im(&[&[1, 0], &[0, 1]]);
        // t(F) = t must equal E for (s, E) o (t, F)
        let h = GroupoidElement::new(t.clone(), f.clone()).unwrap();
        let id_at_target = GroupoidElement::identity(h.target()).unwrap();
        assert_eq!(compose(&id_at_target, &h).unwrap(), h);
        assert_eq!(
            compose(&h, &GroupoidElement::identity(f.clone()).unwrap()).unwrap(),
            h
        );

        let g = GroupoidElement::new(s.clone(), e.clone()).unwrap();
        let back = GroupoidElement::new(s.clone(), s.mul(&e)).unwrap();
        let loop_ = compose(&g, &back).unwrap();
        assert_eq!(loop_.map(), &IntMatrix::identity(2));
        assert_eq!(loop_.source(), &s.mul(&e));

        assert_eq!(compose(&g, &h), Err(Error::UndefinedComposition));
        assert!(matches!(
            GroupoidElement::new(im(&[&[2, 0], &[0, 1]]), f),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn real_roots_of_a2() {
        let RealRoots::Complete(roots) = enumerate_real_roots(&mat("t,1;t^-1,t"), 100) else {
            panic!("inconclusive");
        };
        let vs: Vec<_> = roots.iter().map(|r| r.root.clone()).collect();
        assert_eq!(vs, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert!(roots.iter().all(|r| r.height == Height::Infinite));
    }

    #[test]
    fn real_roots_of_g2() {
        let RealRoots::Complete(roots) = enumerate_real_roots(&mat("t,1;t^-3,t^3"), 100) else {
            panic!("inconclusive");
        };
        let vs: BTreeSet<_> = roots.iter().map(|r| r.root.clone()).collect();
        let want: BTreeSet<_> = [[1, 0], [0, 1], [1, 1], [2, 1], [3, 1], [3, 2]]
            .iter()
            .map(|v| v.to_vec())
            .collect();
        assert_eq!(vs, want);
    }

    #[test]
    fn heights_of_row7_roots_are_finite() {
        let m = mat("u(1/3),1;u(5/6),u(1/2)");
        let RealRoots::Complete(roots) = enumerate_real_roots(&m, 100) else {
            panic!("inconclusive");
        };
        assert!(!roots.is_empty());
        for r in &roots {
            let chi = crate::braiding::bicharacter_eval(&m, &r.root, &r.root).unwrap();
            let ord = chi.multiplicative_order().finite().unwrap();
            assert!(ord >= 2);
            assert_eq!(r.height, Height::Finite(ord));
        }
    }

    #[test]
    fn affine_type_is_inconclusive() {
        assert_eq!(
            enumerate_real_roots(&mat("t,1;t^-2,t"), 50),
            RealRoots::Inconclusive
        );
    }
}
