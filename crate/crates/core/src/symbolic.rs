//! Symbolic unfriendly partitions of presentations.
//!
//! A symbolic partition colours every copy of a family the same way (the
//! default) except for finitely many exceptions. The solver classifies
//! separator vertices by symbolic degree, computes per-family opponent
//! signatures by recursive enumeration, and accepts an assignment when
//! every finite-degree position wins by exact counting and every
//! infinite-degree position receives an opponent from some omega family
//! per default copy. On valid presentations no residual repair set is
//! ever needed; an unsat outcome signals a bug.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::cardinal::{Finite, Omega, SymbolicCardinal};
use crate::error::{Error, Result};
use crate::finite::extend_pre_partition;
use crate::graph::{FiniteGraph, Partition, Side};
use crate::presentation::{self, CopyFamily, Presentation, Terminal, VertexAddress};

/// Search bounds for the symbolic solver.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Largest leaf child enumerated exhaustively.
    pub max_leaf: usize,
    /// Exception budget per family.
    pub max_exceptions: usize,
}

impl Default for SolveConfig {
    fn default() -> SolveConfig {
        SolveConfig { max_leaf: 6, max_exceptions: 8 }
    }
}

/// Default-plus-exceptions colouring of a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyPartition {
    pub default: Box<SymbolicPartition>,
    #[serde(default, with = "exception_keys")]
    pub exceptions: BTreeMap<u64, SymbolicPartition>,
}

/// JSON objects key by strings; expose the copy indices as such. (Plain
/// integer keys would also break deserialization inside the untagged
/// `SymbolicPartition` enum, which buffers values generically.)
mod exception_keys {
    use super::SymbolicPartition;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<u64, SymbolicPartition>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_map(map.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<u64, SymbolicPartition>, D::Error> {
        let wire: BTreeMap<String, SymbolicPartition> = Deserialize::deserialize(d)?;
        wire.into_iter()
            .map(|(k, v)| {
                k.parse()
                    .map(|k| (k, v))
                    .map_err(|_| D::Error::custom(format!("bad exception index {k:?}")))
            })
            .collect()
    }
}

/// A two-colouring of the graph presented by a `Presentation`, mirroring
/// its tree shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolicPartition {
    Glue {
        s_colours: BTreeMap<String, Side>,
        families: Vec<FamilyPartition>,
    },
    Leaf {
        leaf_colours: BTreeMap<String, Side>,
    },
}

impl SymbolicPartition {
    /// Swap the two colour names everywhere.
    pub fn swapped(&self) -> SymbolicPartition {
        match self {
            SymbolicPartition::Leaf { leaf_colours } => SymbolicPartition::Leaf {
                leaf_colours: leaf_colours.iter().map(|(v, s)| (v.clone(), s.flip())).collect(),
            },
            SymbolicPartition::Glue { s_colours, families } => SymbolicPartition::Glue {
                s_colours: s_colours.iter().map(|(v, s)| (v.clone(), s.flip())).collect(),
                families: families
                    .iter()
                    .map(|f| FamilyPartition {
                        default: Box::new(f.default.swapped()),
                        exceptions: f
                            .exceptions
                            .iter()
                            .map(|(i, e)| (*i, e.swapped()))
                            .collect(),
                    })
                    .collect(),
            },
        }
    }

    /// Colour of a boundary vertex (leaf vertex or root separator vertex).
    pub(crate) fn boundary_colour(&self, v: &str) -> Result<Side> {
        let colours = match self {
            SymbolicPartition::Leaf { leaf_colours } => leaf_colours,
            SymbolicPartition::Glue { s_colours, .. } => s_colours,
        };
        colours
            .get(v)
            .copied()
            .ok_or_else(|| Error::Input(format!("partition has no colour for boundary vertex {v:?}")))
    }
}

/// Contribution of one child copy: opponents handed to each attached
/// parent separator vertex, with every child-internal vertex happy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpponentSignature {
    pub opponents: BTreeMap<String, u64>,
    pub child_happy: bool,
}

/// Solver bookkeeping at the root glue node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverState {
    /// Separator vertices of finite symbolic degree.
    pub s0: BTreeSet<String>,
    /// Separator vertices of infinite symbolic degree.
    pub s1: BTreeSet<String>,
    /// Achievable signatures per family, for the accepted colouring of S.
    pub family_signatures: Vec<BTreeSet<OpponentSignature>>,
    /// Default signature chosen per family.
    pub chosen_defaults: Vec<OpponentSignature>,
    pub exceptions_used: bool,
    /// Positions left unhappy; empty on every successful solve.
    pub residual_unhappy: BTreeSet<String>,
}

impl SolverState {
    fn trivial() -> SolverState {
        SolverState {
            s0: BTreeSet::new(),
            s1: BTreeSet::new(),
            family_signatures: Vec::new(),
            chosen_defaults: Vec::new(),
            exceptions_used: false,
            residual_unhappy: BTreeSet::new(),
        }
    }
}

/// Split the root separator by symbolic degree: finite-degree vertices
/// versus infinite-degree ones.
pub fn classify_s(p: &Presentation) -> Result<(BTreeSet<String>, BTreeSet<String>)> {
    let s = match p {
        Presentation::Glue { s, .. } => s,
        Presentation::Leaf { .. } => {
            return Err(Error::Input("classify_s needs a glue node".into()))
        }
    };
    let mut s0 = BTreeSet::new();
    let mut s1 = BTreeSet::new();
    for v in s.vertices() {
        if presentation::local_degree(p, v, 0).is_omega() {
            s1.insert(v.to_owned());
        } else {
            s0.insert(v.to_owned());
        }
    }
    Ok((s0, s1))
}

/// External-neighbour colour counts per boundary vertex: (side 0, side 1).
type Ext = BTreeMap<String, (u64, u64)>;

type Sig = BTreeMap<String, Side>;

fn ext_total(ext: &Ext, v: &str) -> u64 {
    ext.get(v).map_or(0, |(a, b)| a + b)
}

fn ext_opponents(ext: &Ext, v: &str, own: Side) -> u64 {
    ext.get(v).map_or(0, |(zero, one)| match own {
        Side::Zero => *one,
        Side::One => *zero,
    })
}

fn child_ext(fam: &CopyFamily, sc: &BTreeMap<String, Side>) -> Ext {
    let mut out = Ext::new();
    for (pv, cv) in &fam.attachment {
        let entry = out.entry(cv.clone()).or_insert((0, 0));
        match sc[pv] {
            Side::Zero => entry.0 += 1,
            Side::One => entry.1 += 1,
        }
    }
    out
}

/// Opponents a copy with boundary colouring `sig` hands to `s`.
fn sig_opponents(fam: &CopyFamily, sig: &Sig, sc: &BTreeMap<String, Side>, s: &str) -> u64 {
    fam.attachment.iter().filter(|(pv, cv)| pv == s && sig[cv] != sc[s]).count() as u64
}

fn to_signature(fam: &CopyFamily, sig: &Sig, sc: &BTreeMap<String, Side>) -> OpponentSignature {
    let attached: BTreeSet<&String> = fam.attachment.iter().map(|(pv, _)| pv).collect();
    OpponentSignature {
        opponents: attached
            .into_iter()
            .map(|s| (s.clone(), sig_opponents(fam, sig, sc, s)))
            .collect(),
        child_happy: true,
    }
}

/// Fixed assignments routed down the tree.
#[derive(Debug, Clone, Default)]
struct FixedTree {
    local: BTreeMap<String, Side>,
    children: BTreeMap<(usize, u64), FixedTree>,
}

impl FixedTree {
    fn is_empty(&self) -> bool {
        self.local.is_empty() && self.children.is_empty()
    }

    fn from_addresses(p: &Presentation, fixed: &BTreeMap<String, Side>) -> Result<FixedTree> {
        let mut root = FixedTree::default();
        for (text, side) in fixed {
            let addr = VertexAddress::parse(text)?;
            presentation::resolve(p, &addr)?;
            let mut node = &mut root;
            for step in &addr.steps {
                node = node.children.entry(*step).or_default();
            }
            let name = match &addr.terminal {
                Terminal::S(n) | Terminal::LeafVertex(n) => n.clone(),
            };
            node.local.insert(name, *side);
        }
        Ok(root)
    }
}

#[derive(Debug, Clone)]
struct OptionEntry {
    sig: Sig,
    witness: SymbolicPartition,
}

struct GlueSolution {
    sig: Sig,
    witness: SymbolicPartition,
    state: SolverState,
}

fn odometer(lens: Vec<usize>) -> impl Iterator<Item = Vec<usize>> {
    let done_immediately = lens.iter().any(|&l| l == 0);
    let mut cur: Option<Vec<usize>> = if done_immediately { None } else { Some(vec![0; lens.len()]) };
    std::iter::from_fn(move || {
        let state = cur.as_mut()?;
        let item = state.clone();
        // Advance the odometer, rightmost digit fastest.
        let mut i = state.len();
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            state[i] += 1;
            if state[i] < lens[i] {
                break;
            }
            state[i] = 0;
        }
        Some(item)
    })
}

struct Solver<'c> {
    cfg: &'c SolveConfig,
    memo: HashMap<(usize, Ext), Vec<OptionEntry>>,
}

impl Solver<'_> {
    /// All admissible boundary colourings of `node` under the external
    /// context, one witness per distinct signature, sorted by signature.
    fn options(&mut self, node: &Presentation, ext: &Ext, fixed: &FixedTree) -> Result<Vec<OptionEntry>> {
        let key = (node as *const Presentation as usize, ext.clone());
        if fixed.is_empty() {
            if let Some(hit) = self.memo.get(&key) {
                return Ok(hit.clone());
            }
        }
        let result = match node {
            Presentation::Leaf { graph } => {
                if !fixed.children.is_empty() {
                    return Err(Error::Input("fixed address descends below a leaf".into()));
                }
                self.leaf_options(graph, ext, &fixed.local, false)?
            }
            Presentation::Glue { s, families } if families.is_empty() => {
                if !fixed.children.is_empty() {
                    return Err(Error::Input(
                        "fixed address descends below a glue node with no families".into(),
                    ));
                }
                self.leaf_options(s, ext, &fixed.local, true)?
            }
            Presentation::Glue { s, families } => {
                let sols = self.glue_solutions(node, s, families, ext, fixed, false)?;
                let mut seen = BTreeSet::new();
                let mut opts: Vec<OptionEntry> = sols
                    .into_iter()
                    .filter(|g| seen.insert(g.sig.clone()))
                    .map(|g| OptionEntry { sig: g.sig, witness: g.witness })
                    .collect();
                opts.sort_by(|a, b| a.sig.cmp(&b.sig));
                opts
            }
        };
        if fixed.is_empty() {
            self.memo.insert(key, result.clone());
        }
        Ok(result)
    }

    /// Exhaustive enumeration over a finite vertex set: all colourings
    /// under which every non-fixed vertex is happy, counting internal and
    /// external neighbours exactly.
    fn leaf_options(
        &self,
        graph: &FiniteGraph,
        ext: &Ext,
        fixed: &BTreeMap<String, Side>,
        as_glue: bool,
    ) -> Result<Vec<OptionEntry>> {
        let names: Vec<&str> = graph.vertices().collect();
        if names.len() > self.cfg.max_leaf {
            return Err(Error::Capacity(format!(
                "leaf with {} vertices exceeds the exhaustive bound {}",
                names.len(),
                self.cfg.max_leaf
            )));
        }
        for v in fixed.keys() {
            if !graph.contains_vertex(v) {
                return Err(Error::Input(format!("fixed vertex {v:?} does not exist")));
            }
        }
        let mut out: Vec<OptionEntry> = Vec::new();
        let mut seen = BTreeSet::new();
        'mask: for mask in 0..1u64 << names.len() {
            let colours: BTreeMap<String, Side> = names
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let side = if mask >> i & 1 == 1 { Side::One } else { Side::Zero };
                    (v.to_string(), side)
                })
                .collect();
            for (v, side) in fixed {
                if colours[v] != *side {
                    continue 'mask;
                }
            }
            for v in &names {
                if fixed.contains_key(*v) {
                    continue;
                }
                let own = colours[*v];
                let internal_opp =
                    graph.neighbours(v).filter(|n| colours[*n] != own).count() as u64;
                let opp = internal_opp + ext_opponents(ext, v, own);
                let deg = graph.degree(v) as u64 + ext_total(ext, v);
                if 2 * opp < deg {
                    continue 'mask;
                }
            }
            let sig: Sig = ext.keys().map(|v| (v.clone(), colours[v])).collect();
            if seen.insert(sig.clone()) {
                let witness = if as_glue {
                    SymbolicPartition::Glue { s_colours: colours, families: Vec::new() }
                } else {
                    SymbolicPartition::Leaf { leaf_colours: colours }
                };
                out.push(OptionEntry { sig, witness });
            }
        }
        out.sort_by(|a, b| a.sig.cmp(&b.sig));
        Ok(out)
    }

    fn glue_solutions(
        &mut self,
        node: &Presentation,
        s_graph: &FiniteGraph,
        families: &[CopyFamily],
        ext: &Ext,
        fixed: &FixedTree,
        first_only: bool,
    ) -> Result<Vec<GlueSolution>> {
        // Exception budget per family, fixed copies included.
        let mut fixed_per_family: BTreeMap<usize, u64> = BTreeMap::new();
        for (fi, _) in fixed.children.keys() {
            if *fi >= families.len() {
                return Err(Error::Input(format!("fixed address names family {fi} which does not exist")));
            }
            *fixed_per_family.entry(*fi).or_insert(0) += 1;
        }
        for (fi, count) in &fixed_per_family {
            if *count as usize > self.cfg.max_exceptions {
                return Err(Error::Capacity(format!(
                    "family {fi} needs {count} exceptions, budget is {}",
                    self.cfg.max_exceptions
                )));
            }
        }
        let s_names: Vec<String> = s_graph.vertices().map(|v| v.to_owned()).collect();
        let mut solutions = Vec::new();
        'colour: for mask in 0..1u64 << s_names.len() {
            let sc: BTreeMap<String, Side> = s_names
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let side = if mask >> i & 1 == 1 { Side::One } else { Side::Zero };
                    (v.clone(), side)
                })
                .collect();
            let mut conflict = false;
            for (v, side) in &fixed.local {
                if sc.get(v) != Some(side) {
                    conflict = true;
                }
            }
            if conflict {
                continue 'colour;
            }
            if let Some(sol) =
                self.try_colouring(node, s_graph, families, ext, fixed, &sc)?
            {
                solutions.push(sol);
                if first_only {
                    break 'colour;
                }
            }
        }
        Ok(solutions)
    }

    fn try_colouring(
        &mut self,
        node: &Presentation,
        s_graph: &FiniteGraph,
        families: &[CopyFamily],
        ext: &Ext,
        fixed: &FixedTree,
        sc: &BTreeMap<String, Side>,
    ) -> Result<Option<GlueSolution>> {
        let exempt: BTreeSet<&String> = fixed.local.keys().collect();
        let degrees: BTreeMap<String, SymbolicCardinal> = s_graph
            .vertices()
            .map(|v| (v.to_owned(), presentation::local_degree(node, v, ext_total(ext, v))))
            .collect();
        let s1: Vec<&String> =
            degrees.iter().filter(|(_, d)| d.is_omega()).map(|(v, _)| v).collect();
        let s0: Vec<&String> =
            degrees.iter().filter(|(_, d)| d.is_finite()).map(|(v, _)| v).collect();

        let mut fam_opts: Vec<Vec<OptionEntry>> = Vec::with_capacity(families.len());
        for fam in families {
            let cext = child_ext(fam, sc);
            let opts = self.options(&fam.child, &cext, &FixedTree::default())?;
            if opts.is_empty() {
                return Ok(None);
            }
            fam_opts.push(opts);
        }
        let mut exc_specs: Vec<(usize, u64, Vec<OptionEntry>)> = Vec::new();
        for ((fi, ci), sub) in &fixed.children {
            let fam = &families[*fi];
            let cext = child_ext(fam, sc);
            let opts = self.options(&fam.child, &cext, sub)?;
            if opts.is_empty() {
                return Ok(None);
            }
            exc_specs.push((*fi, *ci, opts));
        }

        // Base opponent counts for finite-degree separator vertices:
        // separator-internal edges plus the external context.
        let base: BTreeMap<&String, u64> = s0
            .iter()
            .map(|s| {
                let own = sc[*s];
                let internal =
                    s_graph.neighbours(s).filter(|t| sc[*t] != own).count() as u64;
                (*s, internal + ext_opponents(ext, s, own))
            })
            .collect();
        let needed: BTreeMap<&String, u64> = s0
            .iter()
            .map(|s| {
                let d = degrees[*s].finite_value().expect("finite by classification");
                (*s, d.div_ceil(2))
            })
            .collect();

        let finite_fams: Vec<usize> = families
            .iter()
            .enumerate()
            .filter(|(_, f)| f.multiplicity.is_finite())
            .map(|(i, _)| i)
            .collect();

        for combo in odometer(fam_opts.iter().map(|o| o.len()).collect()) {
            // Every infinite-degree vertex needs an omega family whose
            // default copy opposes it; omega many copies then supply
            // omega opponents.
            let s1_ok = s1.iter().all(|s| {
                exempt.contains(s)
                    || families.iter().enumerate().any(|(i, f)| {
                        f.multiplicity.is_omega()
                            && sig_opponents(f, &fam_opts[i][combo[i]].sig, sc, s) >= 1
                    })
            });
            if !s1_ok {
                continue;
            }
            for exc_combo in odometer(exc_specs.iter().map(|(_, _, o)| o.len()).collect()) {
                let mut have: BTreeMap<&String, u64> = base.clone();
                let mut fixed_exc_count: BTreeMap<usize, u64> = BTreeMap::new();
                for (k, (fi, _, opts)) in exc_specs.iter().enumerate() {
                    *fixed_exc_count.entry(*fi).or_insert(0) += 1;
                    for s in &s0 {
                        *have.get_mut(s).unwrap() +=
                            sig_opponents(&families[*fi], &opts[exc_combo[k]].sig, sc, s);
                    }
                }
                // Default copies of finite families (omega families cannot
                // touch a finite-degree separator vertex).
                let mut contrib_default: BTreeMap<&String, u64> = BTreeMap::new();
                for &i in &finite_fams {
                    let m = families[i].multiplicity.finite_value().unwrap();
                    let avail = m - fixed_exc_count.get(&i).copied().unwrap_or(0);
                    for s in &s0 {
                        *contrib_default.entry(s).or_insert(0) +=
                            avail * sig_opponents(&families[i], &fam_opts[i][combo[i]].sig, sc, s);
                    }
                }
                let all_default_ok = s0.iter().all(|s| {
                    exempt.contains(s)
                        || 2 * (have[s] + contrib_default.get(s).copied().unwrap_or(0))
                            >= 2 * needed[s]
                });
                let voluntary = if all_default_ok {
                    Some(Vec::new())
                } else {
                    self.repair_exceptions(
                        families, &fam_opts, &combo, &finite_fams, &fixed_exc_count, sc, &s0,
                        &exempt, &have, &needed,
                    )
                };
                if let Some(voluntary) = voluntary {
                    let sol = self.assemble(
                        families, &fam_opts, &combo, &exc_specs, &exc_combo, &voluntary, sc, ext,
                        &s0, &s1,
                    );
                    return Ok(Some(sol));
                }
            }
        }
        Ok(None)
    }

    /// Look for finitely many recoloured copies in finite families that
    /// raise every deficient finite-degree separator vertex to its
    /// opponent quota. One alternative signature per family suffices at
    /// the bundled scale.
    #[allow(clippy::too_many_arguments)]
    fn repair_exceptions(
        &self,
        families: &[CopyFamily],
        fam_opts: &[Vec<OptionEntry>],
        combo: &[usize],
        finite_fams: &[usize],
        fixed_exc_count: &BTreeMap<usize, u64>,
        sc: &BTreeMap<String, Side>,
        s0: &[&String],
        exempt: &BTreeSet<&String>,
        have: &BTreeMap<&String, u64>,
        needed: &BTreeMap<&String, u64>,
    ) -> Option<Vec<(usize, usize, u64)>> {
        fn dfs<'a>(
            slot: usize,
            finite_fams: &[usize],
            families: &[CopyFamily],
            fam_opts: &[Vec<OptionEntry>],
            combo: &[usize],
            fixed_exc_count: &BTreeMap<usize, u64>,
            budget: u64,
            sc: &BTreeMap<String, Side>,
            s0: &[&'a String],
            exempt: &BTreeSet<&String>,
            acc: &mut BTreeMap<&'a String, u64>,
            needed: &BTreeMap<&String, u64>,
            chosen: &mut Vec<(usize, usize, u64)>,
        ) -> bool {
            if slot == finite_fams.len() {
                return s0
                    .iter()
                    .all(|s| exempt.contains(s) || 2 * acc[s] >= 2 * needed[s]);
            }
            let i = finite_fams[slot];
            let fam = &families[i];
            let m = fam.multiplicity.finite_value().unwrap();
            let avail = m - fixed_exc_count.get(&i).copied().unwrap_or(0);
            let default_idx = combo[i];
            let default_sig = &fam_opts[i][default_idx].sig;
            // Choice: keep all defaults, or move `count` copies to one
            // alternative signature.
            let mut choices: Vec<(usize, u64)> = vec![(default_idx, 0)];
            for (alt, opt) in fam_opts[i].iter().enumerate() {
                if alt == default_idx {
                    continue;
                }
                let max_count = avail.min(budget);
                for count in 1..=max_count {
                    let _ = opt;
                    choices.push((alt, count));
                }
            }
            for (alt, count) in choices {
                let mut deltas: Vec<(&String, u64, u64)> = Vec::new();
                for s in s0 {
                    let d = sig_opponents(fam, default_sig, sc, s);
                    let a = sig_opponents(fam, &fam_opts[i][alt].sig, sc, s);
                    let added = (avail - count) * d + count * a;
                    deltas.push((s, acc[s], acc[s] + added));
                }
                for (s, _, after) in &deltas {
                    *acc.get_mut(*s).unwrap() = *after;
                }
                if dfs(
                    slot + 1, finite_fams, families, fam_opts, combo, fixed_exc_count, budget, sc,
                    s0, exempt, acc, needed, chosen,
                ) {
                    if count > 0 {
                        chosen.push((i, alt, count));
                    }
                    return true;
                }
                for (s, before, _) in &deltas {
                    *acc.get_mut(*s).unwrap() = *before;
                }
            }
            false
        }

        let mut acc: BTreeMap<&String, u64> = have.clone();
        let mut chosen = Vec::new();
        // `have` excludes the default contributions on purpose: the DFS
        // adds each family's full (default + exception) contribution.
        if dfs(
            0,
            finite_fams,
            families,
            fam_opts,
            combo,
            fixed_exc_count,
            self.cfg.max_exceptions as u64,
            sc,
            s0,
            exempt,
            &mut acc,
            needed,
            &mut chosen,
        ) {
            Some(chosen)
        } else {
            None
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        &self,
        families: &[CopyFamily],
        fam_opts: &[Vec<OptionEntry>],
        combo: &[usize],
        exc_specs: &[(usize, u64, Vec<OptionEntry>)],
        exc_combo: &[usize],
        voluntary: &[(usize, usize, u64)],
        sc: &BTreeMap<String, Side>,
        ext: &Ext,
        s0: &[&String],
        s1: &[&String],
    ) -> GlueSolution {
        let mut fam_parts: Vec<FamilyPartition> = families
            .iter()
            .enumerate()
            .map(|(i, _)| FamilyPartition {
                default: Box::new(fam_opts[i][combo[i]].witness.clone()),
                exceptions: BTreeMap::new(),
            })
            .collect();
        for (k, (fi, ci, opts)) in exc_specs.iter().enumerate() {
            fam_parts[*fi]
                .exceptions
                .insert(*ci, opts[exc_combo[k]].witness.clone());
        }
        for (fi, alt, count) in voluntary {
            let witness = fam_opts[*fi][*alt].witness.clone();
            let mut idx = 0u64;
            let mut placed = 0;
            while placed < *count {
                if !fam_parts[*fi].exceptions.contains_key(&idx) {
                    fam_parts[*fi].exceptions.insert(idx, witness.clone());
                    placed += 1;
                }
                idx += 1;
            }
        }
        let exceptions_used = fam_parts.iter().any(|f| !f.exceptions.is_empty());
        let state = SolverState {
            s0: s0.iter().map(|s| (*s).clone()).collect(),
            s1: s1.iter().map(|s| (*s).clone()).collect(),
            family_signatures: families
                .iter()
                .zip(fam_opts)
                .map(|(fam, opts)| opts.iter().map(|o| to_signature(fam, &o.sig, sc)).collect())
                .collect(),
            chosen_defaults: families
                .iter()
                .enumerate()
                .map(|(i, fam)| to_signature(fam, &fam_opts[i][combo[i]].sig, sc))
                .collect(),
            exceptions_used,
            residual_unhappy: BTreeSet::new(),
        };
        GlueSolution {
            sig: ext.keys().map(|v| (v.clone(), sc[v])).collect(),
            witness: SymbolicPartition::Glue { s_colours: sc.clone(), families: fam_parts },
            state,
        }
    }
}

/// Achievable opponent signatures of one family under a total colouring
/// of the root separator.
pub fn family_signatures(
    p: &Presentation,
    family_index: usize,
    s_colours: &BTreeMap<String, Side>,
    cfg: &SolveConfig,
) -> Result<BTreeSet<OpponentSignature>> {
    let (s, families) = match p {
        Presentation::Glue { s, families } => (s, families),
        Presentation::Leaf { .. } => {
            return Err(Error::Input("family_signatures needs a glue node".into()))
        }
    };
    for v in s.vertices() {
        if !s_colours.contains_key(v) {
            return Err(Error::Input(format!("colouring is undefined on separator vertex {v:?}")));
        }
    }
    let fam = families
        .get(family_index)
        .ok_or_else(|| Error::Input(format!("no family with index {family_index}")))?;
    let mut solver = Solver { cfg, memo: HashMap::new() };
    let cext = child_ext(fam, s_colours);
    let opts = solver.options(&fam.child, &cext, &FixedTree::default())?;
    Ok(opts.iter().map(|o| to_signature(fam, &o.sig, s_colours)).collect())
}

fn solve_root_leaf(
    graph: &FiniteGraph,
    fixed: &BTreeMap<String, Side>,
    as_glue: bool,
) -> Result<(SymbolicPartition, SolverState)> {
    let fixed_part = Partition::from_assignments(fixed.clone());
    let (pi, _) = extend_pre_partition(graph, &fixed_part)?;
    let colours: BTreeMap<String, Side> = pi.iter().map(|(v, s)| (v.to_owned(), s)).collect();
    let witness = if as_glue {
        SymbolicPartition::Glue { s_colours: colours, families: Vec::new() }
    } else {
        SymbolicPartition::Leaf { leaf_colours: colours }
    };
    Ok((witness, SolverState::trivial()))
}

fn solve_with_fixed(
    p: &Presentation,
    fixed_map: &BTreeMap<String, Side>,
    cfg: &SolveConfig,
) -> Result<(SymbolicPartition, SolverState)> {
    let diags = presentation::validate(p);
    if !diags.is_empty() {
        return Err(Error::Input(format!("invalid presentation: {}", diags.join("; "))));
    }
    let fixed = FixedTree::from_addresses(p, fixed_map)?;
    match p {
        Presentation::Leaf { graph } => solve_root_leaf(graph, &fixed.local, false),
        Presentation::Glue { s, families } if families.is_empty() => {
            solve_root_leaf(s, &fixed.local, true)
        }
        Presentation::Glue { s, families } => {
            let mut solver = Solver { cfg, memo: HashMap::new() };
            let sols = solver.glue_solutions(p, s, families, &Ext::new(), &fixed, true)?;
            sols.into_iter()
                .next()
                .map(|g| (g.witness, g.state))
                .ok_or_else(|| {
                    Error::Unsat(
                        "no symbolic partition found; valid presentations always admit one, \
                         so this indicates a bug"
                            .into(),
                    )
                })
        }
    }
}

/// Find a symbolic partition under which every position is happy.
pub fn solve_unfriendly(
    p: &Presentation,
    cfg: &SolveConfig,
) -> Result<(SymbolicPartition, SolverState)> {
    solve_with_fixed(p, &BTreeMap::new(), cfg)
}

/// Extend finitely many fixed assignments (keyed by textual vertex
/// address) so that every non-fixed position is happy. Fixed vertices
/// inside omega families become exceptions at their copy indices.
pub fn solve_pre_partition(
    p: &Presentation,
    fixed: &BTreeMap<String, Side>,
    cfg: &SolveConfig,
) -> Result<(SymbolicPartition, SolverState)> {
    solve_with_fixed(p, fixed, cfg)
}

/// Verdict for one position of the presented graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionCheck {
    pub position: String,
    pub degree: SymbolicCardinal,
    pub opponents: SymbolicCardinal,
}

/// Outcome of the independent symbolic happiness check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub positions_checked: usize,
    pub unhappy: Vec<PositionCheck>,
}

impl CheckReport {
    pub fn all_happy(&self) -> bool {
        self.unhappy.is_empty()
    }

    /// Unhappy positions outside the given fixed set (pre-partition
    /// inputs are exempt from happiness).
    pub fn unhappy_outside(&self, fixed: &BTreeSet<String>) -> Vec<&PositionCheck> {
        self.unhappy.iter().filter(|u| !fixed.contains(&u.position)).collect()
    }
}

/// Independently verify a symbolic partition: exact counting at every
/// finite-degree position, omega-opponent analysis at every
/// infinite-degree one. This routine shares no state with the solver.
pub fn check_symbolic(p: &Presentation, sigma: &SymbolicPartition) -> Result<CheckReport> {
    let mut report = CheckReport { positions_checked: 0, unhappy: Vec::new() };
    check_node(p, sigma, &Ext::new(), "", &mut report)?;
    Ok(report)
}

fn check_node(
    node: &Presentation,
    sigma: &SymbolicPartition,
    ext: &Ext,
    label: &str,
    report: &mut CheckReport,
) -> Result<()> {
    match (node, sigma) {
        (Presentation::Leaf { graph }, SymbolicPartition::Leaf { leaf_colours }) => {
            check_finite_block(graph, leaf_colours, ext, label, "", report)
        }
        (Presentation::Glue { s, families }, SymbolicPartition::Glue { s_colours, families: parts }) => {
            if families.len() != parts.len() {
                return Err(Error::Input(format!(
                    "{label}: partition has {} families, presentation has {}",
                    parts.len(),
                    families.len()
                )));
            }
            for v in s.vertices() {
                let own = *s_colours.get(v).ok_or_else(|| {
                    Error::Input(format!("{label}: no colour for separator vertex {v:?}"))
                })?;
                let internal = s.neighbours(v).filter(|t| {
                    s_colours.get(*t).map_or(false, |c| *c != own)
                }).count() as u64;
                let mut opponents = Finite(internal + ext_opponents(ext, v, own));
                for (fam, part) in families.iter().zip(parts) {
                    let exc_count = part.exceptions.len() as u64;
                    let default_opp = boundary_opponents(fam, &part.default, v, own)?;
                    match fam.multiplicity {
                        Omega => {
                            if default_opp > 0 {
                                opponents += Omega;
                            }
                        }
                        Finite(m) => {
                            if exc_count > m {
                                return Err(Error::Input(format!(
                                    "{label}: {exc_count} exceptions in a family of multiplicity {m}"
                                )));
                            }
                            opponents += Finite((m - exc_count) * default_opp);
                        }
                    }
                    for (idx, exc) in &part.exceptions {
                        if let Finite(m) = fam.multiplicity {
                            if *idx >= m {
                                return Err(Error::Input(format!(
                                    "{label}: exception index {idx} is not below multiplicity {m}"
                                )));
                            }
                        }
                        opponents += Finite(boundary_opponents(fam, exc, v, own)?);
                    }
                }
                let degree = presentation::local_degree(node, v, ext_total(ext, v));
                record(report, &format!("{label}S:{v}"), degree, opponents);
            }
            for (i, (fam, part)) in families.iter().zip(parts).enumerate() {
                let cext = child_ext(fam, s_colours);
                check_node(&fam.child, &part.default, &cext, &format!("{label}{i}[*]/"), report)?;
                for (idx, exc) in &part.exceptions {
                    check_node(&fam.child, exc, &cext, &format!("{label}{i}[{idx}]/"), report)?;
                }
            }
            Ok(())
        }
        _ => Err(Error::Input(format!(
            "{label}: partition shape does not match the presentation node"
        ))),
    }
}

fn check_finite_block(
    graph: &FiniteGraph,
    colours: &BTreeMap<String, Side>,
    ext: &Ext,
    label: &str,
    kind_prefix: &str,
    report: &mut CheckReport,
) -> Result<()> {
    for v in graph.vertices() {
        let own = *colours
            .get(v)
            .ok_or_else(|| Error::Input(format!("{label}: no colour for vertex {v:?}")))?;
        let internal = graph
            .neighbours(v)
            .filter(|n| colours.get(*n).map_or(false, |c| *c != own))
            .count() as u64;
        let opponents = Finite(internal + ext_opponents(ext, v, own));
        let degree = Finite(graph.degree(v) as u64 + ext_total(ext, v));
        record(report, &format!("{label}{kind_prefix}{v}"), degree, opponents);
    }
    Ok(())
}

fn record(report: &mut CheckReport, position: &str, degree: SymbolicCardinal, opponents: SymbolicCardinal) {
    report.positions_checked += 1;
    let happy = match degree {
        Omega => opponents.is_omega(),
        Finite(d) => match opponents {
            Omega => true,
            Finite(o) => 2 * o >= d,
        },
    };
    if !happy {
        report.unhappy.push(PositionCheck { position: position.to_owned(), degree, opponents });
    }
}

/// Opponents one copy hands to the parent vertex `s` of colour `own`,
/// reading boundary colours off a child partition.
pub(crate) fn boundary_opponents(
    fam: &CopyFamily,
    child: &SymbolicPartition,
    s: &str,
    own: Side,
) -> Result<u64> {
    let mut n = 0;
    for (pv, cv) in &fam.attachment {
        if pv == s && child.boundary_colour(cv)? != own {
            n += 1;
        }
    }
    Ok(n)
}

/// A finite group of copies from omega families whose attachment degree
/// toward `s` strictly exceeds the degree of `s` inside the separator
/// plus its degree into all finite families.
pub fn witness_kapom(
    p: &Presentation,
    sigma: &SymbolicPartition,
    s: &str,
) -> Result<Vec<(usize, u64)>> {
    let (s_graph, families) = match p {
        Presentation::Glue { s, families } => (s, families),
        Presentation::Leaf { .. } => {
            return Err(Error::Input("witness_kapom needs a glue node".into()))
        }
    };
    if !s_graph.contains_vertex(s) {
        return Err(Error::Input(format!("unknown separator vertex {s:?}")));
    }
    if presentation::local_degree(p, s, 0).is_finite() {
        return Err(Error::Input(format!("vertex {s:?} has finite degree and is not in S1")));
    }
    let report = check_symbolic(p, sigma)?;
    if report.unhappy.iter().any(|u| u.position == format!("S:{s}")) {
        return Err(Error::Input(format!("partition leaves {s:?} unhappy")));
    }
    let threshold: u64 = s_graph.degree(s) as u64
        + families
            .iter()
            .filter(|f| f.multiplicity.is_finite())
            .map(|f| f.multiplicity.finite_value().unwrap() * f.attach_degree(s))
            .sum::<u64>();
    let mut group = Vec::new();
    let mut total = 0u64;
    'outer: for (i, fam) in families.iter().enumerate() {
        if !fam.multiplicity.is_omega() {
            continue;
        }
        let per_copy = fam.attach_degree(s);
        if per_copy == 0 {
            continue;
        }
        let mut idx = 0u64;
        while total <= threshold {
            group.push((i, idx));
            total += per_copy;
            idx += 1;
            if total > threshold {
                break 'outer;
            }
        }
    }
    if total <= threshold {
        return Err(Error::Invariant(format!(
            "could not exceed threshold {threshold} for {s:?}; boundary attachments should make this impossible"
        )));
    }
    Ok(group)
}
