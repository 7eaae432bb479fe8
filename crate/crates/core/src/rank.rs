//! Bounded separator-elimination rank of finite graphs.
//!
//! The rank of a graph relative to a base family is 0 when the graph is in
//! the family, and otherwise the least `1 + max` over the components left
//! by deleting some separator of size at most `k`. Unbounded separators
//! would trivialize the finite case (delete everything), so the size bound
//! is mandatory and a graph may have no rank under it.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::FiniteGraph;

/// Default vertex-count ceiling for the exact recursion.
pub const DEFAULT_RANK_CEILING: usize = 16;

/// A pluggable, isomorphism-invariant base family of graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseFamily {
    /// Graphs with no edges. Not finitely closed, but the standard
    /// nontrivial base at desk scale.
    Edgeless,
    /// Graphs on at most `p` vertices. Finitely closed in the finite sense
    /// only up to the order cap.
    OrderAtMost(usize),
    /// Graphs of maximum degree at most `d`.
    MaxDegAtMost(usize),
    /// All finite graphs; every graph has rank 0.
    AllFinite,
}

impl BaseFamily {
    pub fn name(&self) -> String {
        match self {
            BaseFamily::Edgeless => "edgeless".into(),
            BaseFamily::OrderAtMost(p) => format!("order:{p}"),
            BaseFamily::MaxDegAtMost(d) => format!("maxdeg:{d}"),
            BaseFamily::AllFinite => "all-finite".into(),
        }
    }

    /// Parse `edgeless`, `order:<p>`, `maxdeg:<d>` or `all-finite`.
    pub fn parse(s: &str) -> Result<BaseFamily> {
        if s == "edgeless" {
            return Ok(BaseFamily::Edgeless);
        }
        if s == "all-finite" {
            return Ok(BaseFamily::AllFinite);
        }
        if let Some(p) = s.strip_prefix("order:") {
            let p = p
                .parse()
                .map_err(|_| Error::Input(format!("bad order bound in base family {s:?}")))?;
            return Ok(BaseFamily::OrderAtMost(p));
        }
        if let Some(d) = s.strip_prefix("maxdeg:") {
            let d = d
                .parse()
                .map_err(|_| Error::Input(format!("bad degree bound in base family {s:?}")))?;
            return Ok(BaseFamily::MaxDegAtMost(d));
        }
        Err(Error::Input(format!("unknown base family {s:?}")))
    }

    pub fn contains(&self, g: &FiniteGraph) -> bool {
        match self {
            BaseFamily::Edgeless => g.num_edges() == 0,
            BaseFamily::OrderAtMost(p) => g.num_vertices() <= *p,
            BaseFamily::MaxDegAtMost(d) => g.vertices().all(|v| g.degree(v) <= *d),
            BaseFamily::AllFinite => true,
        }
    }
}

/// Rank value plus the separator tree realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankResult {
    pub rank: u64,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// The subgraph lies in the base family.
    Base { vertices: Vec<String> },
    /// Deleting `separator` leaves the recorded components.
    Separate { separator: Vec<String>, children: Vec<RankResult> },
}

fn combinations(items: &[String], size: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn rec(items: &[String], size: usize, start: usize, current: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size - current.len() {
                break;
            }
            current.push(items[i].clone());
            rec(items, size, i + 1, current, out);
            current.pop();
        }
    }
    rec(items, size, 0, &mut current, &mut out);
    out
}

struct RankCtx<'a> {
    host: &'a FiniteGraph,
    base: BaseFamily,
    k: usize,
    memo: Mutex<HashMap<BTreeSet<String>, Option<RankResult>>>,
}

impl RankCtx<'_> {
    fn rank_of(&self, vs: &BTreeSet<String>) -> Option<RankResult> {
        if let Some(hit) = self.memo.lock().unwrap().get(vs) {
            return hit.clone();
        }
        let result = self.compute(vs);
        self.memo.lock().unwrap().insert(vs.clone(), result.clone());
        result
    }

    fn compute(&self, vs: &BTreeSet<String>) -> Option<RankResult> {
        let h = self.host.induced(vs);
        if self.base.contains(&h) {
            return Some(RankResult {
                rank: 0,
                witness: Witness::Base { vertices: vs.iter().cloned().collect() },
            });
        }
        let sorted: Vec<String> = vs.iter().cloned().collect();
        let mut best: Option<RankResult> = None;
        // Separators in increasing size, lexicographic within a size; the
        // first witness of the minimal rank wins.
        'sep: for size in 0..=self.k.min(sorted.len()) {
            for sep in combinations(&sorted, size) {
                let sep_set: BTreeSet<String> = sep.iter().cloned().collect();
                let rest: BTreeSet<String> = vs.difference(&sep_set).cloned().collect();
                let comps = self.host.induced(&rest).components();
                // An empty separator on a connected graph makes no progress.
                if comps.len() == 1 && comps[0].len() == vs.len() {
                    continue;
                }
                let children = self.rank_components(&comps);
                let Some(children) = children else { continue };
                let rank = 1 + children.iter().map(|c| c.rank).max().unwrap_or(0);
                if best.as_ref().map_or(true, |b| rank < b.rank) {
                    best = Some(RankResult {
                        rank,
                        witness: Witness::Separate { separator: sep, children },
                    });
                    if rank == 1 {
                        break 'sep;
                    }
                }
            }
        }
        best
    }

    #[cfg(feature = "parallel")]
    fn rank_components(&self, comps: &[BTreeSet<String>]) -> Option<Vec<RankResult>> {
        comps.par_iter().map(|c| self.rank_of(c)).collect()
    }

    #[cfg(not(feature = "parallel"))]
    fn rank_components(&self, comps: &[BTreeSet<String>]) -> Option<Vec<RankResult>> {
        comps.iter().map(|c| self.rank_of(c)).collect()
    }
}

/// Least rank of `g` under separators of size at most `k`, with a witness
/// tree, or `None` when no rank exists under the bound.
pub fn bounded_rank(
    g: &FiniteGraph,
    base: BaseFamily,
    k: usize,
    ceiling: usize,
) -> Result<Option<RankResult>> {
    if g.num_vertices() > ceiling {
        return Err(Error::Capacity(format!(
            "{} vertices exceed the exact-rank ceiling {ceiling}",
            g.num_vertices()
        )));
    }
    let ctx = RankCtx { host: g, base, k, memo: Mutex::new(HashMap::new()) };
    Ok(ctx.rank_of(g.vertex_set()))
}

/// Unmemoized, sequential reference recursion; returns the rank value
/// only. Kept independent of [`bounded_rank`] as an oracle.
pub fn naive_bounded_rank(g: &FiniteGraph, base: BaseFamily, k: usize) -> Option<u64> {
    fn go(host: &FiniteGraph, base: BaseFamily, k: usize, vs: &BTreeSet<String>) -> Option<u64> {
        let h = host.induced(vs);
        if base.contains(&h) {
            return Some(0);
        }
        let sorted: Vec<String> = vs.iter().cloned().collect();
        let mut best: Option<u64> = None;
        for size in 0..=k.min(sorted.len()) {
            for sep in combinations(&sorted, size) {
                let sep_set: BTreeSet<String> = sep.into_iter().collect();
                let rest: BTreeSet<String> = vs.difference(&sep_set).cloned().collect();
                let comps = host.induced(&rest).components();
                if comps.len() == 1 && comps[0].len() == vs.len() {
                    continue;
                }
                let mut worst = 0;
                let mut ok = true;
                for comp in &comps {
                    match go(host, base, k, comp) {
                        Some(r) => worst = worst.max(r),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    let cand = 1 + worst;
                    if best.map_or(true, |b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
        }
        best
    }
    go(g, base, k, g.vertex_set())
}

/// Replay a witness tree: separators within the size bound, child ranks
/// strictly below their parent, every base leaf actually in the family.
pub fn verify_witness(g: &FiniteGraph, base: BaseFamily, k: usize, result: &RankResult) -> bool {
    fn go(host: &FiniteGraph, base: BaseFamily, k: usize, vs: &BTreeSet<String>, r: &RankResult) -> bool {
        match &r.witness {
            Witness::Base { vertices } => {
                let claimed: BTreeSet<String> = vertices.iter().cloned().collect();
                r.rank == 0 && claimed == *vs && base.contains(&host.induced(vs))
            }
            Witness::Separate { separator, children } => {
                if separator.len() > k || r.rank == 0 {
                    return false;
                }
                let sep: BTreeSet<String> = separator.iter().cloned().collect();
                if !sep.is_subset(vs) {
                    return false;
                }
                let rest: BTreeSet<String> = vs.difference(&sep).cloned().collect();
                let comps = host.induced(&rest).components();
                if comps.len() != children.len() {
                    return false;
                }
                comps.iter().zip(children).all(|(comp, child)| {
                    child.rank < r.rank && go(host, base, k, comp, child)
                })
            }
        }
    }
    go(g, base, k, g.vertex_set(), result)
}

/// Finite shadow of the union bound for separator witnesses: the subgraph
/// spanned by `separator` and a subset of the components it leaves has
/// rank at most the maximum component rank, under the enlarged budget
/// `k * (1 + n)`.
pub fn rank_union_check(
    g: &FiniteGraph,
    base: BaseFamily,
    k: usize,
    separator: &BTreeSet<String>,
    component_indices: &[usize],
    ceiling: usize,
) -> Result<bool> {
    for v in separator {
        if !g.contains_vertex(v) {
            return Err(Error::Input(format!("separator vertex {v:?} is not in the graph")));
        }
    }
    if component_indices.is_empty() {
        return Err(Error::Input("component subset must be nonempty".into()));
    }
    let rest: BTreeSet<String> =
        g.vertex_set().difference(separator).cloned().collect();
    let comps = g.induced(&rest).components();
    let mut union: BTreeSet<String> = separator.clone();
    let mut max_comp_rank = 0;
    for &i in component_indices {
        let comp = comps
            .get(i)
            .ok_or_else(|| Error::Input(format!("no component with index {i}")))?;
        union.extend(comp.iter().cloned());
        match bounded_rank(&g.induced(comp), base, k, ceiling)? {
            Some(r) => max_comp_rank = max_comp_rank.max(r.rank),
            None => return Ok(false),
        }
    }
    let k_prime = k * (1 + component_indices.len());
    match bounded_rank(&g.induced(&union), base, k_prime, ceiling)? {
        Some(r) => Ok(r.rank <= max_comp_rank),
        None => Ok(false),
    }
}
