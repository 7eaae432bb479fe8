//! Finite presentations of countable rayless graphs.
//!
//! A presentation is either a finite leaf graph or a finite separator
//! graph `S` glued to families of child copies, each family carrying a
//! multiplicity (a natural or omega) and one attachment pattern shared by
//! all copies. Attachments only target a child's boundary (its leaf
//! vertices, or its own root `S`), so every copy contributes finite
//! degree to every parent separator vertex.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cardinal::{Finite, Omega, SymbolicCardinal};
use crate::error::{Error, Result};
use crate::graph::FiniteGraph;

/// A family of identical child copies glued to the parent separator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyFamily {
    pub multiplicity: SymbolicCardinal,
    pub child: Presentation,
    /// Pairs (parent S-vertex, child boundary vertex); one edge per copy.
    pub attachment: BTreeSet<(String, String)>,
}

impl CopyFamily {
    /// Attachment edges incident with the parent vertex `s`, per copy.
    pub fn attach_degree(&self, s: &str) -> u64 {
        self.attachment.iter().filter(|(p, _)| p == s).count() as u64
    }

    /// Attachment edges incident with the child boundary vertex `b`.
    pub fn attach_degree_child(&self, b: &str) -> u64 {
        self.attachment.iter().filter(|(_, c)| c == b).count() as u64
    }
}

/// Recursive finite description of a countable rayless graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Presentation {
    Leaf {
        graph: FiniteGraph,
    },
    Glue {
        /// Separator vertices including their internal edges.
        s: FiniteGraph,
        families: Vec<CopyFamily>,
    },
}

impl Presentation {
    pub fn leaf(graph: FiniteGraph) -> Presentation {
        Presentation::Leaf { graph }
    }

    /// The vertices a parent may attach to: the leaf vertex set, or the
    /// root separator of a glue node.
    pub fn boundary(&self) -> &BTreeSet<String> {
        match self {
            Presentation::Leaf { graph } => graph.vertex_set(),
            Presentation::Glue { s, .. } => s.vertex_set(),
        }
    }

    /// True when every multiplicity in the tree is finite, i.e. the
    /// presentation describes a finite graph.
    pub fn is_finite(&self) -> bool {
        match self {
            Presentation::Leaf { .. } => true,
            Presentation::Glue { families, .. } => families
                .iter()
                .all(|f| f.multiplicity.is_finite() && f.child.is_finite()),
        }
    }

    pub fn families(&self) -> &[CopyFamily] {
        match self {
            Presentation::Leaf { .. } => &[],
            Presentation::Glue { families, .. } => families,
        }
    }
}

/// Check all structural invariants; an empty list means the presentation
/// is valid. Diagnostics name the offending node by its family-index path
/// (the root is `root`).
pub fn validate(p: &Presentation) -> Vec<String> {
    let mut out = Vec::new();
    fn go(p: &Presentation, path: &str, out: &mut Vec<String>) {
        match p {
            Presentation::Leaf { graph } => {
                if graph.num_vertices() == 0 {
                    out.push(format!("{path}: leaf graph is empty"));
                }
            }
            Presentation::Glue { s, families } => {
                if s.num_vertices() == 0 {
                    out.push(format!("{path}: separator S is empty"));
                }
                for (i, fam) in families.iter().enumerate() {
                    let fam_path = format!("{path}/{i}");
                    for (pv, cv) in &fam.attachment {
                        if !s.contains_vertex(pv) {
                            out.push(format!(
                                "{fam_path}: attachment parent vertex {pv:?} is not in S"
                            ));
                        }
                        if !fam.child.boundary().contains(cv) {
                            out.push(format!(
                                "{fam_path}: attachment child vertex {cv:?} is not on the child boundary"
                            ));
                        }
                    }
                    go(&fam.child, &fam_path, out);
                }
            }
        }
    }
    go(p, "root", &mut out);
    out
}

/// Where an address bottoms out.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Terminal {
    /// A separator vertex of the glue node reached by the steps.
    S(String),
    /// A vertex of the leaf graph reached by the steps.
    LeafVertex(String),
}

/// A concrete vertex of the presented graph: a path of
/// (family index, copy index) steps plus a terminal vertex name.
/// Textual form: `0[3]/1[0]/S:c` or `0[3]/x`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct VertexAddress {
    pub steps: Vec<(usize, u64)>,
    pub terminal: Terminal,
}

impl fmt::Display for VertexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (fam, copy) in &self.steps {
            write!(f, "{fam}[{copy}]/")?;
        }
        match &self.terminal {
            Terminal::S(name) => write!(f, "S:{name}"),
            Terminal::LeafVertex(name) => write!(f, "{name}"),
        }
    }
}

impl VertexAddress {
    pub fn parse(text: &str) -> Result<VertexAddress> {
        let segments: Vec<&str> = text.split('/').collect();
        let (last, steps_text) = segments.split_last().ok_or_else(|| {
            Error::Input("empty vertex address".into())
        })?;
        let mut steps = Vec::with_capacity(steps_text.len());
        for seg in steps_text {
            steps.push(parse_step(seg)?);
        }
        let terminal = match last.strip_prefix("S:") {
            Some(name) if !name.is_empty() => Terminal::S(name.to_owned()),
            Some(_) => return Err(Error::Input(format!("empty S vertex name in address {text:?}"))),
            None if last.is_empty() => {
                return Err(Error::Input(format!("empty terminal in address {text:?}")))
            }
            None => Terminal::LeafVertex((*last).to_owned()),
        };
        Ok(VertexAddress { steps, terminal })
    }

    /// The position class of the address: the family-index path plus the
    /// vertex name, with copy indices erased.
    pub fn position(&self) -> String {
        let mut out = String::new();
        for (fam, _) in &self.steps {
            out.push_str(&format!("{fam}/"));
        }
        match &self.terminal {
            Terminal::S(name) => out.push_str(&format!("S:{name}")),
            Terminal::LeafVertex(name) => out.push_str(name),
        }
        out
    }
}

fn parse_step(seg: &str) -> Result<(usize, u64)> {
    let inner = seg
        .strip_suffix(']')
        .and_then(|s| s.split_once('['))
        .ok_or_else(|| Error::Input(format!("malformed address step {seg:?}")))?;
    let fam = inner
        .0
        .parse()
        .map_err(|_| Error::Input(format!("malformed family index in step {seg:?}")))?;
    let copy = inner
        .1
        .parse()
        .map_err(|_| Error::Input(format!("malformed copy index in step {seg:?}")))?;
    Ok((fam, copy))
}

/// Walk an address down the tree, checking family and copy indices, and
/// return the node holding the terminal vertex together with the
/// attachment degree contributed by the parent family (0 at the root).
pub(crate) fn resolve<'a>(
    p: &'a Presentation,
    addr: &VertexAddress,
) -> Result<(&'a Presentation, u64)> {
    let mut node = p;
    let mut parent_attach = 0u64;
    for (i, (fam_idx, copy_idx)) in addr.steps.iter().enumerate() {
        let families = match node {
            Presentation::Glue { families, .. } => families,
            Presentation::Leaf { .. } => {
                return Err(Error::Input(format!(
                    "address {addr} descends below a leaf at step {i}"
                )))
            }
        };
        let fam = families.get(*fam_idx).ok_or_else(|| {
            Error::Input(format!("address {addr}: no family with index {fam_idx}"))
        })?;
        if let Finite(m) = fam.multiplicity {
            if *copy_idx >= m {
                return Err(Error::Input(format!(
                    "address {addr}: copy index {copy_idx} is not below multiplicity {m}"
                )));
            }
        }
        if i + 1 == addr.steps.len() {
            let name = match &addr.terminal {
                Terminal::S(n) | Terminal::LeafVertex(n) => n,
            };
            parent_attach = fam.attach_degree_child(name);
        }
        node = &fam.child;
    }
    match (&addr.terminal, node) {
        (Terminal::S(name), Presentation::Glue { s, .. }) if s.contains_vertex(name) => {}
        (Terminal::LeafVertex(name), Presentation::Leaf { graph }) if graph.contains_vertex(name) => {}
        _ => {
            return Err(Error::Input(format!(
                "address {addr}: terminal vertex does not exist at the addressed node"
            )))
        }
    }
    Ok((node, parent_attach))
}

/// Degree of a node-local vertex: internal edges, external edges from the
/// parent attachment, and the families glued below.
pub(crate) fn local_degree(node: &Presentation, v: &str, parent_attach: u64) -> SymbolicCardinal {
    let mut deg = Finite(parent_attach);
    match node {
        Presentation::Leaf { graph } => deg += Finite(graph.degree(v) as u64),
        Presentation::Glue { s, families } => {
            deg += Finite(s.degree(v) as u64);
            for fam in families {
                deg += fam.multiplicity * Finite(fam.attach_degree(v));
            }
        }
    }
    deg
}

/// Symbolic degree of the vertex at `addr`.
pub fn symbolic_degree(p: &Presentation, addr: &VertexAddress) -> Result<SymbolicCardinal> {
    let (node, parent_attach) = resolve(p, addr)?;
    let name = match &addr.terminal {
        Terminal::S(n) | Terminal::LeafVertex(n) => n,
    };
    Ok(local_degree(node, name, parent_attach))
}

/// Per-position degree and infinite-degree flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionInfo {
    pub degree: SymbolicCardinal,
    /// Symbolic number of neighbours of infinite degree.
    pub infinite_neighbours: SymbolicCardinal,
    pub in_v_infinity: bool,
    pub in_v_star: bool,
    /// How many copies of this position the presented graph contains.
    pub copies: SymbolicCardinal,
}

/// Degrees and the V-infinity / V-star classification per position.
///
/// A position is a vertex of the tree with copy indices erased; all
/// copies of a position are interchangeable, so the flags are shared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeAtlas {
    pub positions: BTreeMap<String, PositionInfo>,
    pub v_star_size: SymbolicCardinal,
}

/// Degrees of a node's own vertices, given the per-copy attachment degree
/// each boundary vertex receives from its parent.
fn node_degrees(
    node: &Presentation,
    parent_attach: &BTreeMap<String, u64>,
) -> BTreeMap<String, SymbolicCardinal> {
    let names: Vec<&str> = match node {
        Presentation::Leaf { graph } => graph.vertices().collect(),
        Presentation::Glue { s, .. } => s.vertices().collect(),
    };
    names
        .into_iter()
        .map(|v| {
            let ext = parent_attach.get(v).copied().unwrap_or(0);
            (v.to_owned(), local_degree(node, v, ext))
        })
        .collect()
}

fn family_child_attach(fam: &CopyFamily) -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    for (_, cv) in &fam.attachment {
        *out.entry(cv.clone()).or_insert(0) += 1;
    }
    out
}

/// Compute the full degree atlas of a valid presentation.
pub fn degree_atlas(p: &Presentation) -> DegreeAtlas {
    let mut positions = BTreeMap::new();
    walk_atlas(p, "", &BTreeMap::new(), &BTreeMap::new(), Finite(1), &mut positions);
    let mut v_star_size = Finite(0);
    for info in positions.values() {
        if info.in_v_star {
            v_star_size += info.copies;
        }
    }
    DegreeAtlas { positions, v_star_size }
}

/// `parent_attach`: per boundary vertex, the per-copy attachment degree
/// from the parent. `parent_inf_attach`: the part of it coming from
/// parent vertices of infinite degree.
fn walk_atlas(
    node: &Presentation,
    prefix: &str,
    parent_attach: &BTreeMap<String, u64>,
    parent_inf_attach: &BTreeMap<String, u64>,
    copies: SymbolicCardinal,
    out: &mut BTreeMap<String, PositionInfo>,
) {
    let degrees = node_degrees(node, parent_attach);
    // Per-family boundary degrees of the children, needed to count a
    // parent's infinite-degree neighbours below it.
    let child_degrees: Vec<BTreeMap<String, SymbolicCardinal>> = node
        .families()
        .iter()
        .map(|fam| node_degrees(&fam.child, &family_child_attach(fam)))
        .collect();

    let (graph, is_glue) = match node {
        Presentation::Leaf { graph } => (graph, false),
        Presentation::Glue { s, .. } => (s, true),
    };
    for v in graph.vertices() {
        let mut inf_nbrs = Finite(parent_inf_attach.get(v).copied().unwrap_or(0));
        for n in graph.neighbours(v) {
            if degrees[n].is_omega() {
                inf_nbrs += Finite(1);
            }
        }
        for (fam, cdeg) in node.families().iter().zip(&child_degrees) {
            let per_copy = fam
                .attachment
                .iter()
                .filter(|(pv, cv)| pv == v && cdeg[cv].is_omega())
                .count() as u64;
            inf_nbrs += fam.multiplicity * Finite(per_copy);
        }
        let degree = degrees[v];
        let in_v_infinity = degree.is_omega();
        let key = if is_glue { format!("{prefix}S:{v}") } else { format!("{prefix}{v}") };
        out.insert(
            key,
            PositionInfo {
                degree,
                infinite_neighbours: inf_nbrs,
                in_v_infinity,
                in_v_star: in_v_infinity && inf_nbrs.is_finite(),
                copies,
            },
        );
    }
    for (i, (fam, _)) in node.families().iter().zip(&child_degrees).enumerate() {
        let attach = family_child_attach(fam);
        let mut inf_attach = BTreeMap::new();
        for (pv, cv) in &fam.attachment {
            if degrees[pv].is_omega() {
                *inf_attach.entry(cv.clone()).or_insert(0) += 1;
            }
        }
        walk_atlas(
            &fam.child,
            &format!("{prefix}{i}/"),
            &attach,
            &inf_attach,
            copies * fam.multiplicity,
            out,
        );
    }
}

/// True iff the presented graph lies in the class of countable graphs
/// whose set of infinite-degree vertices with finitely many
/// infinite-degree neighbours is finite.
pub fn is_in_w(p: &Presentation) -> bool {
    degree_atlas(p).v_star_size.is_finite()
}

/// Upper bound on the elimination rank of the presented graph: 0 for
/// finite instantiations, otherwise one more than the deepest omega
/// family. Exact when every child presents a connected graph.
pub fn structural_rank(p: &Presentation) -> u64 {
    match p {
        Presentation::Leaf { .. } => 0,
        Presentation::Glue { families, .. } => families
            .iter()
            .map(|f| match f.multiplicity {
                Omega => 1 + structural_rank(&f.child),
                Finite(_) => structural_rank(&f.child),
            })
            .max()
            .unwrap_or(0),
    }
}

/// A minimum-size (hence subset-minimal) subset of the root separator
/// whose removal drops the structural rank of every remaining component.
/// Finite-degree separator vertices get merged into adjacent components,
/// so every returned vertex has infinite symbolic degree.
pub fn minimal_separator(p: &Presentation) -> Result<BTreeSet<String>> {
    let rank = structural_rank(p);
    let (s, families) = match p {
        Presentation::Glue { s, families } if rank >= 1 => (s, families),
        _ => {
            return Err(Error::Input(
                "minimal_separator needs a glue node of structural rank at least 1".into(),
            ))
        }
    };
    let s_vertices: Vec<String> = s.vertices().map(|v| v.to_owned()).collect();
    for size in 0..=s_vertices.len() {
        for subset in subsets_of_size(&s_vertices, size) {
            let removed: BTreeSet<String> = subset.iter().cloned().collect();
            if root_components_below(s, families, &removed, rank) {
                return Ok(removed);
            }
        }
    }
    Err(Error::Unsat(
        "no subset of the root separator reduces the structural rank".into(),
    ))
}

fn subsets_of_size(items: &[String], size: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    fn rec(items: &[String], size: usize, start: usize, cur: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            rec(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, size, 0, &mut Vec::new(), &mut out);
    out
}

/// Does every component left by deleting `removed` from the root have
/// structural rank strictly below `bound`?
fn root_components_below(
    s: &FiniteGraph,
    families: &[CopyFamily],
    removed: &BTreeSet<String>,
    bound: u64,
) -> bool {
    let leftover: BTreeSet<String> =
        s.vertex_set().difference(removed).cloned().collect();
    // Group the leftover separator vertices into connected blocks: two are
    // linked by a surviving S-edge, or by both touching the same family
    // (every copy of a family joins all its surviving attachment vertices).
    let left: Vec<&String> = leftover.iter().collect();
    let index: BTreeMap<&str, usize> =
        left.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut dsu: Vec<usize> = (0..left.len()).collect();
    fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
        if dsu[x] != x {
            let root = find(dsu, dsu[x]);
            dsu[x] = root;
        }
        dsu[x]
    }
    for (a, b) in s.edges() {
        if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
            let (ri, rj) = (find(&mut dsu, i), find(&mut dsu, j));
            dsu[ri] = rj;
        }
    }
    let mut family_touch: Vec<Vec<usize>> = Vec::with_capacity(families.len());
    for fam in families {
        let touched: BTreeSet<usize> = fam
            .attachment
            .iter()
            .filter_map(|(pv, _)| index.get(pv.as_str()).copied())
            .collect();
        let touched: Vec<usize> = touched.into_iter().collect();
        for w in touched.windows(2) {
            let (ri, rj) = (find(&mut dsu, w[0]), find(&mut dsu, w[1]));
            dsu[ri] = rj;
        }
        family_touch.push(touched);
    }
    // Detached families: every copy is a component on its own.
    for (fam, touched) in families.iter().zip(&family_touch) {
        if touched.is_empty() && structural_rank(&fam.child) >= bound {
            return false;
        }
    }
    // Components containing leftover separator vertices.
    let mut blocks: BTreeMap<usize, (BTreeSet<String>, Vec<CopyFamily>)> = BTreeMap::new();
    for (i, v) in left.iter().enumerate() {
        let root = find(&mut dsu, i);
        blocks.entry(root).or_default().0.insert((*v).clone());
    }
    for (fam, touched) in families.iter().zip(&family_touch) {
        if let Some(&first) = touched.first() {
            let root = find(&mut dsu, first);
            blocks.get_mut(&root).unwrap().1.push(fam.clone());
        }
    }
    for (vertices, fams) in blocks.into_values() {
        let sub = Presentation::Glue { s: s.induced(&vertices), families: fams };
        if structural_rank(&sub) >= bound {
            return false;
        }
    }
    true
}

/// Replace every omega multiplicity by `n` and build the concrete graph.
/// Vertex names are textual addresses; the returned map parses them back.
pub fn instantiate(
    p: &Presentation,
    n: u64,
) -> Result<(FiniteGraph, BTreeMap<String, VertexAddress>)> {
    let mut vertices: Vec<String> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    build(p, "", n, &mut vertices, &mut edges)?;
    let graph = FiniteGraph::new(vertices.clone(), edges)?;
    let mut map = BTreeMap::new();
    for v in vertices {
        let addr = VertexAddress::parse(&v)?;
        map.insert(v, addr);
    }
    Ok((graph, map))
}

fn boundary_name(child: &Presentation, prefix: &str, b: &str) -> String {
    match child {
        Presentation::Leaf { .. } => format!("{prefix}{b}"),
        Presentation::Glue { .. } => format!("{prefix}S:{b}"),
    }
}

fn build(
    node: &Presentation,
    prefix: &str,
    n: u64,
    vertices: &mut Vec<String>,
    edges: &mut Vec<(String, String)>,
) -> Result<()> {
    match node {
        Presentation::Leaf { graph } => {
            for v in graph.vertices() {
                vertices.push(format!("{prefix}{v}"));
            }
            for (a, b) in graph.edges() {
                edges.push((format!("{prefix}{a}"), format!("{prefix}{b}")));
            }
        }
        Presentation::Glue { s, families } => {
            for v in s.vertices() {
                vertices.push(format!("{prefix}S:{v}"));
            }
            for (a, b) in s.edges() {
                edges.push((format!("{prefix}S:{a}"), format!("{prefix}S:{b}")));
            }
            for (i, fam) in families.iter().enumerate() {
                let count = fam.multiplicity.finite_value().unwrap_or(n);
                for copy in 0..count {
                    let child_prefix = format!("{prefix}{i}[{copy}]/");
                    build(&fam.child, &child_prefix, n, vertices, edges)?;
                    for (pv, cv) in &fam.attachment {
                        edges.push((
                            format!("{prefix}S:{pv}"),
                            boundary_name(&fam.child, &child_prefix, cv),
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}
