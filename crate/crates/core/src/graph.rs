//! Finite graphs, two-colourings and the happiness calculus.
//!
//! A vertex is *happy* in a partition when it has at least as many
//! neighbours in the other class as in its own, i.e. `2 * opponents >= degree`.
//! A partition is *unfriendly* (for a set `Y`) when every vertex (of `Y`)
//! is happy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One of the two partition classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Zero,
    One,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Zero => Side::One,
            Side::One => Side::Zero,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Side::Zero => 0,
            Side::One => 1,
        }
    }

    pub fn from_u8(v: u8) -> Result<Side> {
        match v {
            0 => Ok(Side::Zero),
            1 => Ok(Side::One),
            other => Err(Error::Input(format!("partition side must be 0 or 1, got {other}"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl Serialize for Side {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Side {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = u8::deserialize(deserializer)?;
        Side::from_u8(v).map_err(D::Error::custom)
    }
}

/// A simple loopless graph over opaque string vertex identifiers.
///
/// Iteration over vertices and edges is lexicographic, so traces and
/// emitted JSON are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    vertices: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
    adjacency: BTreeMap<String, BTreeSet<String>>,
}

impl FiniteGraph {
    /// Build a graph, rejecting self-loops, duplicate edges and edges with
    /// endpoints outside the vertex set.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<FiniteGraph>
    where
        V: IntoIterator<Item = String>,
        E: IntoIterator<Item = (String, String)>,
    {
        let vertices: BTreeSet<String> = vertices.into_iter().collect();
        let mut norm = BTreeSet::new();
        let mut adjacency: BTreeMap<String, BTreeSet<String>> =
            vertices.iter().map(|v| (v.clone(), BTreeSet::new())).collect();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Input(format!("self-loop at vertex {a:?}")));
            }
            for end in [&a, &b] {
                if !vertices.contains(end.as_str()) {
                    return Err(Error::Input(format!("edge endpoint {end:?} is not a vertex")));
                }
            }
            let e = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            if !norm.insert(e) {
                return Err(Error::Input(format!("duplicate edge between {a:?} and {b:?}")));
            }
            adjacency.get_mut(&a).unwrap().insert(b.clone());
            adjacency.get_mut(&b).unwrap().insert(a);
        }
        Ok(FiniteGraph { vertices, edges: norm, adjacency })
    }

    pub fn empty() -> FiniteGraph {
        FiniteGraph::new([], []).unwrap()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> {
        self.vertices.iter().map(|s| s.as_str())
    }

    pub fn vertex_set(&self) -> &BTreeSet<String> {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        let e = if a < b { (a.to_owned(), b.to_owned()) } else { (b.to_owned(), a.to_owned()) };
        self.edges.contains(&e)
    }

    pub fn neighbours(&self, v: &str) -> impl Iterator<Item = &str> {
        self.adjacency.get(v).into_iter().flatten().map(|s| s.as_str())
    }

    pub fn degree(&self, v: &str) -> usize {
        self.adjacency.get(v).map_or(0, |n| n.len())
    }

    /// Number of neighbours of `v` inside `targets` (the paper's `d_U(x)`).
    pub fn degree_in(&self, v: &str, targets: &BTreeSet<String>) -> Result<usize> {
        if !self.contains_vertex(v) {
            return Err(Error::Input(format!("unknown vertex {v:?}")));
        }
        for u in targets {
            if !self.contains_vertex(u) {
                return Err(Error::Input(format!("unknown vertex {u:?} in target set")));
            }
        }
        Ok(self.neighbours(v).filter(|n| targets.contains(*n)).count())
    }

    /// Induced subgraph on `keep`.
    pub fn induced(&self, keep: &BTreeSet<String>) -> FiniteGraph {
        let vertices: BTreeSet<String> =
            self.vertices.intersection(keep).cloned().collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| vertices.contains(a) && vertices.contains(b))
            .cloned();
        FiniteGraph::new(vertices.clone(), edges).unwrap()
    }

    /// Connected components, each as a sorted vertex set, ordered by their
    /// least vertex.
    pub fn components(&self) -> Vec<BTreeSet<String>> {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices.iter() {
            if seen.contains(v.as_str()) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![v.as_str()];
            while let Some(x) = stack.pop() {
                if !seen.insert(x) {
                    continue;
                }
                comp.insert(x.to_owned());
                stack.extend(self.neighbours(x));
            }
            out.push(comp);
        }
        out
    }

    /// Total cross-edge count of a partition (the cut size).
    pub fn cut_size(&self, pi: &Partition) -> Result<usize> {
        let mut n = 0;
        for (a, b) in self.edges() {
            if pi.side(a)? != pi.side(b)? {
                n += 1;
            }
        }
        Ok(n)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphWire {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

impl Serialize for FiniteGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphWire {
            vertices: self.vertices.iter().cloned().collect(),
            edges: self.edges.iter().cloned().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = GraphWire::deserialize(deserializer)?;
        FiniteGraph::new(wire.vertices, wire.edges).map_err(D::Error::custom)
    }
}

/// A total or partial two-colouring of vertices.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Partition {
    assignments: BTreeMap<String, Side>,
}

impl Partition {
    pub fn new() -> Partition {
        Partition::default()
    }

    pub fn from_assignments(assignments: BTreeMap<String, Side>) -> Partition {
        Partition { assignments }
    }

    /// The all-`side` partition on the vertices of `g`.
    pub fn constant(g: &FiniteGraph, side: Side) -> Partition {
        Partition {
            assignments: g.vertices().map(|v| (v.to_owned(), side)).collect(),
        }
    }

    pub fn assign(&mut self, v: impl Into<String>, side: Side) {
        self.assignments.insert(v.into(), side);
    }

    pub fn get(&self, v: &str) -> Option<Side> {
        self.assignments.get(v).copied()
    }

    pub fn side(&self, v: &str) -> Result<Side> {
        self.get(v)
            .ok_or_else(|| Error::Input(format!("partition is undefined on vertex {v:?}")))
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.assignments.keys().map(|s| s.as_str())
    }

    pub fn domain_set(&self) -> BTreeSet<String> {
        self.assignments.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn is_total_on(&self, g: &FiniteGraph) -> bool {
        g.vertices().all(|v| self.assignments.contains_key(v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Side)> {
        self.assignments.iter().map(|(v, s)| (v.as_str(), *s))
    }

    /// `self` with every vertex of `flipped` moved to the other class.
    pub fn flip(&self, flipped: &BTreeSet<String>) -> Result<Partition> {
        let mut out = self.clone();
        for v in flipped {
            match out.assignments.get_mut(v) {
                Some(side) => *side = side.flip(),
                None => {
                    return Err(Error::Input(format!(
                        "cannot flip vertex {v:?}: not in the partition domain"
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Swap the two colour names everywhere.
    pub fn swapped(&self) -> Partition {
        Partition {
            assignments: self.assignments.iter().map(|(v, s)| (v.clone(), s.flip())).collect(),
        }
    }
}

/// Per-vertex happiness bookkeeping for a set of target vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexHappiness {
    pub degree: usize,
    pub opponents: usize,
    pub friends: usize,
    pub happy: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HappinessReport {
    pub per_vertex: BTreeMap<String, VertexHappiness>,
    pub unhappy: Vec<String>,
}

impl HappinessReport {
    pub fn all_happy(&self) -> bool {
        self.unhappy.is_empty()
    }
}

/// Evaluate happiness of every vertex in `targets`.
///
/// The partition must be defined on each target and on all of its
/// neighbours.
pub fn happiness(
    g: &FiniteGraph,
    pi: &Partition,
    targets: &BTreeSet<String>,
) -> Result<HappinessReport> {
    let mut per_vertex = BTreeMap::new();
    let mut unhappy = Vec::new();
    for v in targets {
        if !g.contains_vertex(v) {
            return Err(Error::Input(format!("unknown vertex {v:?} in target set")));
        }
        let own = pi.side(v)?;
        let mut opponents = 0;
        let mut friends = 0;
        for n in g.neighbours(v) {
            if pi.side(n)? == own {
                friends += 1;
            } else {
                opponents += 1;
            }
        }
        let degree = g.degree(v);
        let happy = 2 * opponents >= degree;
        if !happy {
            unhappy.push(v.clone());
        }
        per_vertex.insert(v.clone(), VertexHappiness { degree, opponents, friends, happy });
    }
    Ok(HappinessReport { per_vertex, unhappy })
}

/// True iff every vertex of `targets` is happy in `pi`.
pub fn is_unfriendly_for(g: &FiniteGraph, pi: &Partition, targets: &BTreeSet<String>) -> Result<bool> {
    Ok(happiness(g, pi, targets)?.all_happy())
}

/// True iff every vertex of the graph is happy in `pi`.
pub fn is_unfriendly(g: &FiniteGraph, pi: &Partition) -> Result<bool> {
    is_unfriendly_for(g, pi, g.vertex_set())
}

#[cfg(test)]
pub(crate) fn graph(vertices: &[&str], edges: &[(&str, &str)]) -> FiniteGraph {
    FiniteGraph::new(
        vertices.iter().map(|s| s.to_string()),
        edges.iter().map(|(a, b)| (a.to_string(), b.to_string())),
    )
    .unwrap()
}

#[cfg(test)]
pub(crate) fn partition(pairs: &[(&str, u8)]) -> Partition {
    Partition::from_assignments(
        pairs.iter().map(|(v, s)| (v.to_string(), Side::from_u8(*s).unwrap())).collect(),
    )
}
