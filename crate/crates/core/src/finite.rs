//! Constructive solvers for finite graphs.
//!
//! The local-search solvers repeatedly flip an unhappy vertex; each such
//! flip strictly increases a cross-edge potential, which bounds the run.
//! `exact_max_cut_extension` searches all completions exhaustively and is
//! the starting point required by `flip_cascade`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{happiness, FiniteGraph, Partition, Side};

/// Default exhaustive-search bound for `exact_max_cut_extension`.
pub const DEFAULT_MAX_CUT_BOUND: usize = 20;

/// One local-search step: the vertices flipped and the potential afterwards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub flipped: Vec<String>,
    pub potential: usize,
}

/// A record of a local-search run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub initial: Partition,
    pub initial_potential: usize,
    pub steps: Vec<TraceStep>,
}

impl SolveTrace {
    pub fn num_flips(&self) -> usize {
        self.steps.len()
    }
}

fn lex_least_unhappy(
    g: &FiniteGraph,
    pi: &Partition,
    candidates: &BTreeSet<String>,
) -> Result<Option<String>> {
    let report = happiness(g, pi, candidates)?;
    Ok(report.unhappy.into_iter().next())
}

/// Cross edges with at least one endpoint in `incident`.
fn cut_incident(g: &FiniteGraph, pi: &Partition, incident: &BTreeSet<String>) -> Result<usize> {
    let mut n = 0;
    for (a, b) in g.edges() {
        if (incident.contains(a) || incident.contains(b)) && pi.side(a)? != pi.side(b)? {
            n += 1;
        }
    }
    Ok(n)
}

fn local_search(
    g: &FiniteGraph,
    start: Partition,
    free: &BTreeSet<String>,
) -> Result<(Partition, SolveTrace)> {
    let mut pi = start.clone();
    let mut trace = SolveTrace {
        initial_potential: cut_incident(g, &pi, free)?,
        initial: start,
        steps: Vec::new(),
    };
    while let Some(v) = lex_least_unhappy(g, &pi, free)? {
        pi = pi.flip(&BTreeSet::from([v.clone()]))?;
        let potential = cut_incident(g, &pi, free)?;
        trace.steps.push(TraceStep { flipped: vec![v], potential });
    }
    Ok((pi, trace))
}

/// Find an unfriendly partition of a finite graph by local search.
///
/// Starts from `seed` (default: everything on side 0) and flips the
/// lexicographically least unhappy vertex until none remains. Always
/// succeeds: each flip strictly increases the cut size, which is bounded
/// by the edge count.
pub fn unfriendly_partition(
    g: &FiniteGraph,
    seed: Option<Partition>,
) -> Result<(Partition, SolveTrace)> {
    let start = match seed {
        Some(s) => {
            if !s.is_total_on(g) {
                return Err(Error::Input("seed partition is not total on the graph".into()));
            }
            s
        }
        None => Partition::constant(g, Side::Zero),
    };
    local_search(g, start, g.vertex_set())
}

/// Extend a partial partition so that every unfixed vertex is happy.
///
/// Only vertices outside `fixed`'s domain are ever flipped; the potential
/// is the number of cross edges incident with the free vertices.
pub fn extend_pre_partition(
    g: &FiniteGraph,
    fixed: &Partition,
) -> Result<(Partition, SolveTrace)> {
    for v in fixed.domain() {
        if !g.contains_vertex(v) {
            return Err(Error::Input(format!("fixed partition mentions unknown vertex {v:?}")));
        }
    }
    let fixed_dom = fixed.domain_set();
    let free: BTreeSet<String> =
        g.vertices().filter(|v| !fixed_dom.contains(*v)).map(|v| v.to_owned()).collect();
    let mut start = fixed.clone();
    for v in &free {
        start.assign(v.clone(), Side::Zero);
    }
    local_search(g, start, &free)
}

fn free_vertices(g: &FiniteGraph, fixed: &Partition) -> Vec<String> {
    let dom = fixed.domain_set();
    g.vertices().filter(|v| !dom.contains(*v)).map(|v| v.to_owned()).collect()
}

fn completion(fixed: &Partition, free: &[String], mask: u64) -> Partition {
    let mut pi = fixed.clone();
    for (i, v) in free.iter().enumerate() {
        let side = if mask >> i & 1 == 1 { Side::One } else { Side::Zero };
        pi.assign(v.clone(), side);
    }
    pi
}

fn best_mask_seq(g: &FiniteGraph, fixed: &Partition, free: &[String]) -> Result<u64> {
    let mut best = (0usize, 0u64);
    let mut first = true;
    for mask in 0..1u64 << free.len() {
        let cut = g.cut_size(&completion(fixed, free, mask))?;
        if first || cut > best.0 {
            best = (cut, mask);
            first = false;
        }
    }
    Ok(best.1)
}

#[cfg(feature = "parallel")]
fn best_mask_par(g: &FiniteGraph, fixed: &Partition, free: &[String]) -> Result<u64> {
    let results: Vec<(usize, u64)> = (0..1u64 << free.len())
        .into_par_iter()
        .map(|mask| g.cut_size(&completion(fixed, free, mask)).map(|cut| (cut, mask)))
        .collect::<Result<_>>()?;
    // Deterministic tie-break: largest cut, then smallest mask.
    Ok(results
        .into_iter()
        .fold((0usize, u64::MAX), |acc, (cut, mask)| {
            if cut > acc.0 || (cut == acc.0 && mask < acc.1) {
                (cut, mask)
            } else {
                acc
            }
        })
        .1)
}

fn exact_max_cut_with(
    g: &FiniteGraph,
    fixed: &Partition,
    bound: usize,
    parallel: bool,
) -> Result<Partition> {
    for v in fixed.domain() {
        if !g.contains_vertex(v) {
            return Err(Error::Input(format!("fixed partition mentions unknown vertex {v:?}")));
        }
    }
    let free = free_vertices(g, fixed);
    if free.len() > bound {
        return Err(Error::Capacity(format!(
            "{} free vertices exceed the exhaustive-search bound {bound}",
            free.len()
        )));
    }
    #[cfg(feature = "parallel")]
    let mask = if parallel {
        best_mask_par(g, fixed, &free)?
    } else {
        best_mask_seq(g, fixed, &free)?
    };
    #[cfg(not(feature = "parallel"))]
    let mask = {
        let _ = parallel;
        best_mask_seq(g, fixed, &free)?
    };
    Ok(completion(fixed, &free, mask))
}

/// Among all total extensions of `fixed`, return one with the maximum
/// number of cross edges. Such an extension is strongly maximal with
/// respect to the free vertices: no subset flip of free vertices gains
/// cross edges incident with that subset.
pub fn exact_max_cut_extension(
    g: &FiniteGraph,
    fixed: &Partition,
    bound: usize,
) -> Result<Partition> {
    exact_max_cut_with(g, fixed, bound, true)
}

/// Sequential scan over all completions; same contract as
/// [`exact_max_cut_extension`].
pub fn exact_max_cut_extension_seq(
    g: &FiniteGraph,
    fixed: &Partition,
    bound: usize,
) -> Result<Partition> {
    exact_max_cut_with(g, fixed, bound, false)
}

/// Result of a flip-cascade run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeOutcome {
    pub partition: Partition,
    pub trace: SolveTrace,
    /// Cross edges incident with the flipped set before the flip.
    pub k: usize,
    /// Number of single flips performed after flipping the set.
    pub cascade_len: usize,
    /// Whether each flipped vertex ends up happy (not guaranteed).
    pub flipped_happy: std::collections::BTreeMap<String, bool>,
}

/// Flip `to_flip` in a strongly maximal partition, then repair by single
/// flips of unhappy free vertices until all free vertices are happy.
///
/// The counting argument behind strong maximality bounds the cascade by
/// `2k` single flips, where `k` is the number of cross edges incident with
/// `to_flip` before the flip; exceeding the bound is reported as an
/// internal invariant violation.
pub fn flip_cascade(
    g: &FiniteGraph,
    pi: &Partition,
    to_flip: &BTreeSet<String>,
    free: &BTreeSet<String>,
) -> Result<CascadeOutcome> {
    if !pi.is_total_on(g) {
        return Err(Error::Input("partition is not total on the graph".into()));
    }
    if let Some(v) = to_flip.intersection(free).next() {
        return Err(Error::Input(format!("vertex {v:?} is both flipped and free")));
    }
    for v in to_flip.iter().chain(free.iter()) {
        if !g.contains_vertex(v) {
            return Err(Error::Input(format!("unknown vertex {v:?}")));
        }
    }
    let k = cut_incident(g, pi, to_flip)?;
    let mut current = pi.flip(to_flip)?;
    let mut trace = SolveTrace {
        initial: pi.clone(),
        initial_potential: g.cut_size(pi)?,
        steps: Vec::new(),
    };
    trace.steps.push(TraceStep {
        flipped: to_flip.iter().cloned().collect(),
        potential: g.cut_size(&current)?,
    });
    let mut cascade_len = 0;
    while let Some(v) = lex_least_unhappy(g, &current, free)? {
        cascade_len += 1;
        if cascade_len > 2 * k {
            return Err(Error::Invariant(format!(
                "flip cascade exceeded the 2k bound (k = {k})"
            )));
        }
        current = current.flip(&BTreeSet::from([v.clone()]))?;
        trace.steps.push(TraceStep { flipped: vec![v], potential: g.cut_size(&current)? });
    }
    let report = happiness(g, &current, to_flip)?;
    let flipped_happy =
        report.per_vertex.iter().map(|(v, h)| (v.clone(), h.happy)).collect();
    Ok(CascadeOutcome { partition: current, trace, k, cascade_len, flipped_happy })
}

/// Finite analogue of the infinitely-often pairing procedure.
///
/// Scanning the schedule: an uncoloured occurrence is first put on side
/// 0; then the occurrence colours the lexicographically least uncoloured
/// target neighbour opposite, if any, and earns one credit. At the end
/// every target has at least as many opponents as credits.
pub fn round_robin_opponents(
    g: &FiniteGraph,
    targets: &BTreeSet<String>,
    schedule: &[String],
) -> Result<(Partition, std::collections::BTreeMap<String, usize>)> {
    for v in targets {
        if !g.contains_vertex(v) {
            return Err(Error::Input(format!("unknown target vertex {v:?}")));
        }
    }
    let mut credits: std::collections::BTreeMap<String, usize> =
        targets.iter().map(|v| (v.clone(), 0)).collect();
    let mut pi = Partition::new();
    for v in schedule {
        if !targets.contains(v) {
            return Err(Error::Input(format!(
                "schedule references vertex {v:?} outside the target set"
            )));
        }
        if pi.get(v).is_none() {
            pi.assign(v.clone(), Side::Zero);
        }
        let side = pi.get(v).expect("just coloured");
        let next = g
            .neighbours(v)
            .find(|n| targets.contains(*n) && pi.get(n).is_none())
            .map(|n| n.to_owned());
        if let Some(y) = next {
            pi.assign(y, side.flip());
            *credits.get_mut(v).unwrap() += 1;
        }
    }
    Ok((pi, credits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph, is_unfriendly, is_unfriendly_for, partition};

    fn set(vs: &[&str]) -> BTreeSet<String> {
        vs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn unfriendly_edgeless() {
        let g = graph(&["a", "b", "c"], &[]);
        let (pi, trace) = unfriendly_partition(&g, None).unwrap();
        assert_eq!(pi, partition(&[("a", 0), ("b", 0), ("c", 0)]));
        assert_eq!(trace.num_flips(), 0);
    }

    #[test]
    fn unfriendly_triangle() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]);
        let (pi, _) = unfriendly_partition(&g, None).unwrap();
        assert!(is_unfriendly(&g, &pi).unwrap());
        let zeros = pi.iter().filter(|(_, s)| *s == Side::Zero).count();
        assert!(zeros == 1 || zeros == 2);
    }

    #[test]
    fn unfriendly_c4() {
        let g = graph(
            &["v1", "v2", "v3", "v4"],
            &[("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v1")],
        );
        let (pi, _) = unfriendly_partition(&g, None).unwrap();
        let rep = happiness(&g, &pi, g.vertex_set()).unwrap();
        for h in rep.per_vertex.values() {
            assert!(h.opponents >= 1);
            assert!(2 * h.opponents >= h.degree);
        }
    }

    #[test]
    fn trace_potential_strictly_increases() {
        let g = graph(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]);
        let (_, trace) = unfriendly_partition(&g, None).unwrap();
        let mut prev = trace.initial_potential;
        for step in &trace.steps {
            assert!(step.potential > prev);
            prev = step.potential;
        }
    }

    #[test]
    fn extend_path_middle() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let fixed = partition(&[("a", 0), ("c", 0)]);
        let (pi, _) = extend_pre_partition(&g, &fixed).unwrap();
        assert_eq!(pi.get("b"), Some(Side::One));
        assert_eq!(pi.get("a"), Some(Side::Zero));
    }

    #[test]
    fn extend_total_fixed_is_identity() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        let fixed = partition(&[("a", 0), ("b", 0)]);
        let (pi, trace) = extend_pre_partition(&g, &fixed).unwrap();
        assert_eq!(pi, fixed);
        assert_eq!(trace.num_flips(), 0);
    }

    #[test]
    fn extend_empty_fixed_matches_unfriendly_contract() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]);
        let (pi, _) = extend_pre_partition(&g, &Partition::new()).unwrap();
        assert!(is_unfriendly(&g, &pi).unwrap());
    }

    #[test]
    fn max_cut_single_edge() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        let pi = exact_max_cut_extension(&g, &Partition::new(), DEFAULT_MAX_CUT_BOUND).unwrap();
        assert_eq!(g.cut_size(&pi).unwrap(), 1);
    }

    #[test]
    fn max_cut_c5() {
        let g = graph(
            &["a", "b", "c", "d", "e"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")],
        );
        let pi = exact_max_cut_extension(&g, &Partition::new(), DEFAULT_MAX_CUT_BOUND).unwrap();
        assert_eq!(g.cut_size(&pi).unwrap(), 4);
    }

    #[test]
    fn max_cut_triangle_with_fixed() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]);
        let fixed = partition(&[("a", 0)]);
        let pi = exact_max_cut_extension(&g, &fixed, DEFAULT_MAX_CUT_BOUND).unwrap();
        assert_eq!(pi.get("a"), Some(Side::Zero));
        assert_eq!(g.cut_size(&pi).unwrap(), 2);
    }

    #[test]
    fn max_cut_bound_exceeded() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        assert!(matches!(
            exact_max_cut_extension(&g, &Partition::new(), 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn max_cut_seq_par_agree() {
        let g = graph(
            &["a", "b", "c", "d", "e", "f"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "f"), ("f", "a"), ("a", "d")],
        );
        let p1 = exact_max_cut_extension(&g, &Partition::new(), DEFAULT_MAX_CUT_BOUND).unwrap();
        let p2 = exact_max_cut_extension_seq(&g, &Partition::new(), DEFAULT_MAX_CUT_BOUND).unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn cascade_edgeless() {
        let g = graph(&["a", "b"], &[]);
        let pi = partition(&[("a", 0), ("b", 0)]);
        let out = flip_cascade(&g, &pi, &set(&["a"]), &set(&["b"])).unwrap();
        assert_eq!(out.cascade_len, 0);
        assert_eq!(out.k, 0);
    }

    #[test]
    fn cascade_c4_alternating() {
        let g = graph(
            &["v1", "v2", "v3", "v4"],
            &[("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v1")],
        );
        let pi = partition(&[("v1", 0), ("v2", 1), ("v3", 0), ("v4", 1)]);
        let out = flip_cascade(&g, &pi, &set(&["v1"]), &set(&["v2", "v3", "v4"])).unwrap();
        assert_eq!(out.cascade_len, 0);
        assert!(is_unfriendly_for(&g, &out.partition, &set(&["v2", "v3", "v4"])).unwrap());
    }

    #[test]
    fn cascade_star() {
        let g = graph(&["c", "l1", "l2", "l3"], &[("c", "l1"), ("c", "l2"), ("c", "l3")]);
        let pi = exact_max_cut_extension(&g, &Partition::new(), DEFAULT_MAX_CUT_BOUND).unwrap();
        let free = set(&["l2", "l3"]);
        // k = cross edges incident with l1 in the max cut (exactly 1).
        let out = flip_cascade(&g, &pi, &set(&["l1"]), &free).unwrap();
        assert!(out.cascade_len <= 2 * out.k);
        assert!(is_unfriendly_for(&g, &out.partition, &free).unwrap());
    }

    #[test]
    fn cascade_rejects_overlap() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        let pi = partition(&[("a", 0), ("b", 1)]);
        assert!(flip_cascade(&g, &pi, &set(&["a"]), &set(&["a", "b"])).is_err());
    }

    #[test]
    fn round_robin_empty_schedule() {
        let g = graph(&["a"], &[]);
        let (pi, credits) = round_robin_opponents(&g, &set(&["a"]), &[]).unwrap();
        assert!(pi.is_empty());
        assert_eq!(credits["a"], 0);
    }

    #[test]
    fn round_robin_triangle() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]);
        let schedule: Vec<String> =
            ["a", "b", "c", "a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let (pi, credits) = round_robin_opponents(&g, g.vertex_set(), &schedule).unwrap();
        assert!(pi.is_total_on(&g));
        for v in ["a", "b", "c"] {
            let own = pi.get(v).unwrap();
            let opp = g.neighbours(v).filter(|n| pi.get(n) == Some(own.flip())).count();
            assert!(opp >= credits[v]);
        }
    }

    #[test]
    fn round_robin_k4_everyone_has_opponent() {
        let g = graph(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")],
        );
        let schedule: Vec<String> = ["a", "b", "c", "d"]
            .iter()
            .cycle()
            .take(12)
            .map(|s| s.to_string())
            .collect();
        let (pi, _) = round_robin_opponents(&g, g.vertex_set(), &schedule).unwrap();
        for v in ["a", "b", "c", "d"] {
            let own = pi.get(v).unwrap();
            let opp = g.neighbours(v).filter(|n| pi.get(n) == Some(own.flip())).count();
            assert!(opp >= 1, "{v} has no opponent");
        }
    }

    #[test]
    fn round_robin_rejects_non_target() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        let schedule = vec!["b".to_string()];
        assert!(round_robin_opponents(&g, &set(&["a"]), &schedule).is_err());
    }
}
