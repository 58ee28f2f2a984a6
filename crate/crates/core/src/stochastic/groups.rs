//! Group catalog, Cayley-graph truncations, and growth functions.
//!
//! Arbitrary presentations are out of reach (the word problem), so the
//! catalog fixes four families with canonical element forms: integer
//! tuples for `Z^d` and cyclic groups, reduced words for free groups, and
//! integer upper-triangular matrices `(a, b, c)` for the discrete
//! Heisenberg group. The families cover polynomial growth of degree 1, 2,
//! 3+, and 4 as well as exponential growth.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::graph::{DiscreteGraph, VertexId};
use crate::{Error, Result};

/// A finitely generated group with its standard symmetric generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    /// `Z^d` with `S = {±e_1, …, ±e_d}`.
    Lattice { d: usize },
    /// Free group on `rank` letters with `S = {a_i^{±1}}`.
    Free { rank: usize },
    /// Discrete Heisenberg group `H_3(Z)` with `S = {x^{±1}, y^{±1}}`.
    Heisenberg,
    /// Cyclic group `Z_n` with `S = {±1}`.
    Cyclic { n: u64 },
}

impl GroupSpec {
    /// Parses `Z`, `Z3`, `F2`, `H3`, `C12`, and friends.
    pub fn parse(text: &str) -> Result<Self> {
        let spec = match text {
            "Z" => GroupSpec::Lattice { d: 1 },
            "H3" | "Heis" | "Heisenberg" => GroupSpec::Heisenberg,
            _ => {
                let (head, tail) = text
                    .split_at_checked(1)
                    .ok_or_else(|| Error::UnsupportedGroup(text.to_owned()))?;
                let n: u64 = tail
                    .parse()
                    .map_err(|_| Error::UnsupportedGroup(text.to_owned()))?;
                match head {
                    "Z" if n >= 1 => GroupSpec::Lattice { d: n as usize },
                    "F" if n >= 1 => GroupSpec::Free { rank: n as usize },
                    "C" if n >= 2 => GroupSpec::Cyclic { n },
                    _ => return Err(Error::UnsupportedGroup(text.to_owned())),
                }
            }
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        match self {
            GroupSpec::Lattice { d } if *d == 0 => {
                Err(Error::UnsupportedGroup("Z^0 is trivial".into()))
            }
            GroupSpec::Free { rank } if *rank == 0 || *rank > 26 => Err(Error::UnsupportedGroup(
                format!("free rank {rank} outside 1..=26"),
            )),
            GroupSpec::Cyclic { n } if *n < 2 => {
                Err(Error::UnsupportedGroup(format!("cyclic order {n} below 2")))
            }
            _ => Ok(()),
        }
    }

    /// Number of generators including inverses.
    pub fn generator_count(&self) -> usize {
        match self {
            GroupSpec::Lattice { d } => 2 * d,
            GroupSpec::Free { rank } => 2 * rank,
            GroupSpec::Heisenberg => 4,
            GroupSpec::Cyclic { .. } => 2,
        }
    }

    pub(crate) fn identity(&self) -> Element {
        match self {
            GroupSpec::Lattice { d } => Element::Lattice(vec![0; *d]),
            GroupSpec::Free { .. } => Element::Word(Vec::new()),
            GroupSpec::Heisenberg => Element::Heis([0, 0, 0]),
            GroupSpec::Cyclic { .. } => Element::Cyclic(0),
        }
    }

    /// Right multiplication by every generator, in a fixed order.
    /// May contain repeats (e.g. both generators of `Z_2` reach 1).
    pub(crate) fn neighbors(&self, x: &Element) -> Vec<Element> {
        match (self, x) {
            (GroupSpec::Lattice { d }, Element::Lattice(v)) => {
                let mut out = Vec::with_capacity(2 * d);
                for i in 0..*d {
                    for s in [1i64, -1] {
                        let mut w = v.clone();
                        w[i] += s;
                        out.push(Element::Lattice(w));
                    }
                }
                out
            }
            (GroupSpec::Free { rank }, Element::Word(w)) => {
                let mut out = Vec::with_capacity(2 * rank);
                for i in 1..=(*rank as i8) {
                    for g in [i, -i] {
                        let mut word = w.clone();
                        if word.last() == Some(&-g) {
                            word.pop();
                        } else {
                            word.push(g);
                        }
                        out.push(Element::Word(word));
                    }
                }
                out
            }
            (GroupSpec::Heisenberg, Element::Heis([a, b, c])) => {
                vec![
                    Element::Heis([a + 1, *b, *c]),
                    Element::Heis([a - 1, *b, *c]),
                    Element::Heis([*a, b + 1, c + a]),
                    Element::Heis([*a, b - 1, c - a]),
                ]
            }
            (GroupSpec::Cyclic { n }, Element::Cyclic(v)) => {
                vec![
                    Element::Cyclic((v + 1) % n),
                    Element::Cyclic((v + n - 1) % n),
                ]
            }
            _ => unreachable!("element does not belong to this group"),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Lattice { d } => write!(f, "Z{d}"),
            GroupSpec::Free { rank } => write!(f, "F{rank}"),
            GroupSpec::Heisenberg => write!(f, "H3"),
            GroupSpec::Cyclic { n } => write!(f, "C{n}"),
        }
    }
}

/// Canonical element key of one of the supported families.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Element {
    Lattice(Vec<i64>),
    Word(Vec<i8>),
    Heis([i64; 3]),
    Cyclic(u64),
}

impl Element {
    pub(crate) fn key(&self) -> String {
        match self {
            Element::Lattice(v) => v
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
            Element::Word(w) => {
                if w.is_empty() {
                    "e".to_owned()
                } else {
                    w.iter()
                        .map(|&g| {
                            let letter = (b'a' + (g.unsigned_abs() - 1)) as char;
                            if g > 0 {
                                letter
                            } else {
                                letter.to_ascii_uppercase()
                            }
                        })
                        .collect()
                }
            }
            Element::Heis([a, b, c]) => format!("{a},{b},{c}"),
            Element::Cyclic(v) => v.to_string(),
        }
    }
}

/// A finite ball of a Cayley graph: the graph with `m ≡ 1` and unit
/// adjacency weights, plus the sphere of maximal radius marked as
/// boundary.
#[derive(Clone, Debug)]
pub struct CayleyTruncation {
    pub graph: DiscreteGraph,
    pub origin: VertexId,
    pub boundary: BTreeSet<VertexId>,
    pub radius: usize,
}

/// Breadth-first generation of the word-metric ball of the given radius.
pub fn cayley_graph(spec: &GroupSpec, radius: usize) -> Result<CayleyTruncation> {
    spec.check()?;
    let identity = spec.identity();
    let mut index: HashMap<Element, usize> = HashMap::new();
    let mut order: Vec<Element> = Vec::new();
    let mut dist: Vec<usize> = Vec::new();
    index.insert(identity.clone(), 0);
    order.push(identity.clone());
    dist.push(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if dist[i] == radius {
            continue;
        }
        let here = order[i].clone();
        for next in spec.neighbors(&here) {
            if !index.contains_key(&next) {
                index.insert(next.clone(), order.len());
                queue.push_back(order.len());
                order.push(next);
                dist.push(dist[i] + 1);
            }
        }
    }

    let mut pairs = BTreeSet::new();
    for (i, x) in order.iter().enumerate() {
        for y in spec.neighbors(x) {
            if let Some(&j) = index.get(&y) {
                if i != j {
                    pairs.insert((i.min(j), i.max(j)));
                }
            }
        }
    }
    let graph = DiscreteGraph::new(
        order.iter().map(|x| (VertexId::new(x.key()), 1.0)),
        pairs.into_iter().map(|(i, j)| {
            (
                VertexId::new(order[i].key()),
                VertexId::new(order[j].key()),
                1.0,
            )
        }),
    )?;
    let boundary = order
        .iter()
        .zip(&dist)
        .filter(|&(_, &d)| d == radius)
        .map(|(x, _)| VertexId::new(x.key()))
        .collect();
    Ok(CayleyTruncation {
        graph,
        origin: VertexId::new(spec.identity().key()),
        boundary,
        radius,
    })
}

/// Ball counts `γ(n)` of the word metric, with a log-log slope fit.
#[derive(Clone, Debug)]
pub struct GrowthTable {
    pub radii: Vec<usize>,
    pub counts: Vec<u64>,
}

impl GrowthTable {
    pub fn gamma(&self, n: usize) -> Option<u64> {
        self.counts.get(n).copied()
    }

    /// Least-squares slope of `ln γ(n)` against `ln n` over `lo..=hi`.
    pub fn fitted_slope(&self, lo: usize, hi: usize) -> Result<f64> {
        if lo < 1 || hi <= lo || hi >= self.counts.len() {
            return Err(Error::InvalidParameter(format!(
                "slope window [{lo}, {hi}] outside table of size {}",
                self.counts.len()
            )));
        }
        let points: Vec<(f64, f64)> = (lo..=hi)
            .map(|n| ((n as f64).ln(), (self.counts[n] as f64).ln()))
            .collect();
        Ok(least_squares_slope(&points))
    }
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

pub(crate) fn least_squares_residual(points: &[(f64, f64)], slope: f64) -> f64 {
    let n = points.len() as f64;
    let mx: f64 = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my: f64 = points.iter().map(|p| p.1).sum::<f64>() / n;
    let intercept = my - slope * mx;
    (points
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
}

/// Exact `γ(n)` for `n ≤ n_max` via breadth-first generation with
/// canonical element keys.
pub fn growth_function(spec: &GroupSpec, n_max: usize) -> Result<GrowthTable> {
    spec.check()?;
    let mut seen: HashMap<Element, ()> = HashMap::new();
    let mut frontier = vec![spec.identity()];
    seen.insert(spec.identity(), ());
    let mut counts = vec![1u64];
    for _ in 1..=n_max {
        let mut next = Vec::new();
        for x in &frontier {
            for y in spec.neighbors(x) {
                if !seen.contains_key(&y) {
                    seen.insert(y.clone(), ());
                    next.push(y);
                }
            }
        }
        counts.push(seen.len() as u64);
        frontier = next;
        if frontier.is_empty() {
            // Finite group exhausted; the ball is the whole group.
            while counts.len() <= n_max {
                let total = seen.len() as u64;
                counts.push(total);
            }
            break;
        }
    }
    Ok(GrowthTable {
        radii: (0..counts.len()).collect(),
        counts,
    })
}

/// Recurrent or transient, per the classification of recurrent groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupVerdict {
    Recurrent,
    Transient,
}

impl fmt::Display for GroupVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupVerdict::Recurrent => f.write_str("recurrent"),
            GroupVerdict::Transient => f.write_str("transient"),
        }
    }
}

/// Growth regime used as justification for the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthKind {
    Polynomial(u32),
    Exponential,
    Finite,
}

/// A catalog verdict together with the growth evidence behind it.
#[derive(Clone, Debug)]
pub struct RecurrenceClass {
    pub verdict: GroupVerdict,
    pub growth: GrowthKind,
    pub note: String,
}

/// Catalog rule: a group is recurrent exactly when it has a finite-index
/// subgroup `Z` or `Z²` — here, `Z`, `Z²`, finite cyclic groups, and
/// `F_1 = Z`. Everything else in the catalog is transient.
pub fn classify_recurrence(spec: &GroupSpec) -> Result<RecurrenceClass> {
    spec.check()?;
    let class = match spec {
        GroupSpec::Lattice { d } if *d <= 2 => RecurrenceClass {
            verdict: GroupVerdict::Recurrent,
            growth: GrowthKind::Polynomial(*d as u32),
            note: format!("Z^{d} has polynomial growth of degree {d} <= 2"),
        },
        GroupSpec::Lattice { d } => RecurrenceClass {
            verdict: GroupVerdict::Transient,
            growth: GrowthKind::Polynomial(*d as u32),
            note: format!("Z^{d} has polynomial growth of degree {d} >= 3"),
        },
        GroupSpec::Free { rank: 1 } => RecurrenceClass {
            verdict: GroupVerdict::Recurrent,
            growth: GrowthKind::Polynomial(1),
            note: "F_1 is Z, polynomial growth of degree 1".into(),
        },
        GroupSpec::Free { rank } => RecurrenceClass {
            verdict: GroupVerdict::Transient,
            growth: GrowthKind::Exponential,
            note: format!("F_{rank} grows exponentially and has no finite-index Z or Z^2 subgroup"),
        },
        GroupSpec::Heisenberg => RecurrenceClass {
            verdict: GroupVerdict::Transient,
            growth: GrowthKind::Polynomial(4),
            note: "H_3(Z) has polynomial growth of degree 4".into(),
        },
        GroupSpec::Cyclic { n } => RecurrenceClass {
            verdict: GroupVerdict::Recurrent,
            growth: GrowthKind::Finite,
            note: format!("Z_{n} is finite"),
        },
    };
    Ok(class)
}
