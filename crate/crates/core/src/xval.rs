//! Cross-validation of symbolic partitions against finite
//! instantiations.
//!
//! For each n in a range, every omega multiplicity is replaced by n and
//! the symbolic partition is replicated over the copies, exceptions
//! landing at their indices. Samples are grouped by position (address
//! with copy indices erased). Finite-degree positions must become and
//! stay happy; infinite-degree ones must accumulate opponents at least
//! linearly in n.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cardinal::SymbolicCardinal;
use crate::error::{Error, Result};
use crate::graph::Side;
use crate::presentation::{self, Presentation};
use crate::symbolic::{self, SymbolicPartition};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Worst copy of a position at one value of n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionSample {
    /// Smallest instantiated degree over the copies.
    pub degree: u64,
    /// Smallest opponent count over the copies.
    pub opponents: u64,
    /// True iff every copy is happy.
    pub happy: bool,
}

/// All samples for one value of n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NSlice {
    pub n: u64,
    pub graph_order: usize,
    pub positions: BTreeMap<String, PositionSample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// Happy at every sampled n from n0 on.
    ExactHappy { n0: u64 },
    /// Opponents grow at least like c * (n - e).
    GrowingOpponents { c: u64, e: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddressVerdict {
    pub position: String,
    pub degree: SymbolicCardinal,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossValReport {
    pub slices: Vec<NSlice>,
    pub verdicts: Vec<AddressVerdict>,
    pub warnings: Vec<String>,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Colour every vertex of `instantiate(p, n)` according to the symbolic
/// partition. Exceptions whose copy index is not realized at this n are
/// dropped with a warning.
pub fn instantiate_partition(
    p: &Presentation,
    sigma: &SymbolicPartition,
    n: u64,
) -> Result<(BTreeMap<String, Side>, Vec<String>)> {
    let mut colours = BTreeMap::new();
    let mut warnings = Vec::new();
    assign(p, sigma, "", n, &mut colours, &mut warnings)?;
    Ok((colours, warnings))
}

fn assign(
    node: &Presentation,
    sigma: &SymbolicPartition,
    prefix: &str,
    n: u64,
    out: &mut BTreeMap<String, Side>,
    warnings: &mut Vec<String>,
) -> Result<()> {
    match (node, sigma) {
        (Presentation::Leaf { graph }, SymbolicPartition::Leaf { leaf_colours }) => {
            for v in graph.vertices() {
                let side = leaf_colours.get(v).ok_or_else(|| {
                    Error::Input(format!("{prefix}: no colour for leaf vertex {v:?}"))
                })?;
                out.insert(format!("{prefix}{v}"), *side);
            }
            Ok(())
        }
        (
            Presentation::Glue { s, families },
            SymbolicPartition::Glue { s_colours, families: parts },
        ) => {
            if families.len() != parts.len() {
                return Err(Error::Input(format!(
                    "{prefix}: partition has {} families, presentation has {}",
                    parts.len(),
                    families.len()
                )));
            }
            for v in s.vertices() {
                let side = s_colours.get(v).ok_or_else(|| {
                    Error::Input(format!("{prefix}: no colour for separator vertex {v:?}"))
                })?;
                out.insert(format!("{prefix}S:{v}"), *side);
            }
            for (i, (fam, part)) in families.iter().zip(parts).enumerate() {
                let count = fam.multiplicity.finite_value().unwrap_or(n);
                for idx in part.exceptions.keys() {
                    if *idx >= count {
                        warnings.push(format!(
                            "n={n}: exception {prefix}{i}[{idx}] not realized, dropped"
                        ));
                    }
                }
                for copy in 0..count {
                    let child_sigma =
                        part.exceptions.get(&copy).unwrap_or(&part.default);
                    assign(
                        &fam.child,
                        child_sigma,
                        &format!("{prefix}{i}[{copy}]/"),
                        n,
                        out,
                        warnings,
                    )?;
                }
            }
            Ok(())
        }
        _ => Err(Error::Input(format!(
            "{prefix}: partition shape does not match the presentation node"
        ))),
    }
}

/// Per infinite-degree separator position: c = omega families whose
/// default copy opposes it, e = largest exception count at its node.
fn growth_constants(
    node: &Presentation,
    sigma: &SymbolicPartition,
    prefix: &str,
    atlas: &presentation::DegreeAtlas,
    out: &mut BTreeMap<String, (u64, u64)>,
) -> Result<()> {
    let (s, families, s_colours, parts) = match (node, sigma) {
        (
            Presentation::Glue { s, families },
            SymbolicPartition::Glue { s_colours, families: parts },
        ) => (s, families, s_colours, parts),
        _ => return Ok(()),
    };
    let e = parts.iter().map(|p| p.exceptions.len() as u64).max().unwrap_or(0);
    for v in s.vertices() {
        let key = format!("{prefix}S:{v}");
        let info = atlas
            .positions
            .get(&key)
            .ok_or_else(|| Error::Invariant(format!("no atlas entry for {key}")))?;
        if !info.degree.is_omega() {
            continue;
        }
        let own = *s_colours.get(v).ok_or_else(|| {
            Error::Input(format!("{prefix}: no colour for separator vertex {v:?}"))
        })?;
        let mut c = 0;
        for (fam, part) in families.iter().zip(parts) {
            if fam.multiplicity.is_omega()
                && symbolic::boundary_opponents(fam, &part.default, v, own)? >= 1
            {
                c += 1;
            }
        }
        out.insert(key, (c, e));
    }
    for (i, (fam, part)) in families.iter().zip(parts).enumerate() {
        growth_constants(&fam.child, &part.default, &format!("{prefix}{i}/"), atlas, out)?;
    }
    Ok(())
}

fn slice_at(p: &Presentation, sigma: &SymbolicPartition, n: u64) -> Result<(NSlice, Vec<String>)> {
    let (graph, address_map) = presentation::instantiate(p, n)?;
    let (colours, warnings) = instantiate_partition(p, sigma, n)?;
    let mut positions: BTreeMap<String, PositionSample> = BTreeMap::new();
    for v in graph.vertices() {
        let own = colours
            .get(v)
            .copied()
            .ok_or_else(|| Error::Invariant(format!("no colour for instantiated vertex {v:?}")))?;
        let opponents =
            graph.neighbours(v).filter(|u| colours.get(*u).map_or(false, |c| *c != own)).count()
                as u64;
        let degree = graph.degree(v) as u64;
        let happy = 2 * opponents >= degree;
        let position = address_map
            .get(v)
            .ok_or_else(|| Error::Invariant(format!("no address for vertex {v:?}")))?
            .position();
        positions
            .entry(position)
            .and_modify(|s| {
                s.degree = s.degree.min(degree);
                s.opponents = s.opponents.min(opponents);
                s.happy &= happy;
            })
            .or_insert(PositionSample { degree, opponents, happy });
    }
    Ok((NSlice { n, graph_order: graph.num_vertices(), positions }, warnings))
}

/// Instantiate presentation and partition over the given n values and
/// check the limit semantics position by position.
pub fn cross_validate(
    p: &Presentation,
    sigma: &SymbolicPartition,
    ns: &[u64],
) -> Result<CrossValReport> {
    let check = symbolic::check_symbolic(p, sigma)?;
    if !check.all_happy() {
        return Err(Error::Input(format!(
            "partition fails the symbolic check at {} position(s), e.g. {}",
            check.unhappy.len(),
            check.unhappy[0].position
        )));
    }
    let atlas = presentation::degree_atlas(p);
    let mut growth = BTreeMap::new();
    growth_constants(p, sigma, "", &atlas, &mut growth)?;

    let mut ns: Vec<u64> = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    #[cfg(feature = "parallel")]
    let computed: Result<Vec<(NSlice, Vec<String>)>> =
        ns.par_iter().map(|&n| slice_at(p, sigma, n)).collect();
    #[cfg(not(feature = "parallel"))]
    let computed: Result<Vec<(NSlice, Vec<String>)>> =
        ns.iter().map(|&n| slice_at(p, sigma, n)).collect();
    let computed = computed?;
    let mut slices = Vec::with_capacity(computed.len());
    let mut warnings = Vec::new();
    for (slice, warns) in computed {
        slices.push(slice);
        warnings.extend(warns);
    }

    let mut verdicts = Vec::new();
    let mut failures = Vec::new();
    for (position, info) in &atlas.positions {
        let samples: Vec<(u64, &PositionSample)> = slices
            .iter()
            .filter_map(|s| s.positions.get(position).map(|ps| (s.n, ps)))
            .collect();
        match info.degree {
            SymbolicCardinal::Omega => {
                let (c, e) = growth.get(position).copied().unwrap_or((0, 0));
                let mut last = None;
                for (n, ps) in &samples {
                    let bound = c * n.saturating_sub(e);
                    if ps.opponents < bound {
                        failures.push(format!(
                            "{position}: opponents {} below bound {bound} at n={n}",
                            ps.opponents
                        ));
                    }
                    if let Some(prev) = last {
                        if ps.opponents < prev {
                            failures.push(format!(
                                "{position}: opponents decreased to {} at n={n}",
                                ps.opponents
                            ));
                        }
                    }
                    last = Some(ps.opponents);
                }
                verdicts.push(AddressVerdict {
                    position: position.clone(),
                    degree: info.degree,
                    verdict: Verdict::GrowingOpponents { c, e },
                });
            }
            SymbolicCardinal::Finite(_) => {
                let last_unhappy = samples.iter().filter(|(_, ps)| !ps.happy).map(|(n, _)| *n).max();
                let n0 = match last_unhappy {
                    None => samples.first().map(|(n, _)| *n).unwrap_or(0),
                    Some(bad) => {
                        if samples.last().map_or(false, |(n, _)| *n == bad) {
                            failures.push(format!("{position}: unhappy at n={bad}"));
                        }
                        bad + 1
                    }
                };
                verdicts.push(AddressVerdict {
                    position: position.clone(),
                    degree: info.degree,
                    verdict: Verdict::ExactHappy { n0 },
                });
            }
        }
    }
    let passed = failures.is_empty();
    Ok(CrossValReport { slices, verdicts, warnings, failures, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::symbolic::{solve_unfriendly, SolveConfig};

    fn solved(p: &Presentation) -> SymbolicPartition {
        solve_unfriendly(p, &SolveConfig::default()).unwrap().0
    }

    #[test]
    fn omega_star_centre_grows_linearly() {
        let p = corpus::omega_star();
        let sigma = solved(&p);
        let ns: Vec<u64> = (1..=8).collect();
        let report = cross_validate(&p, &sigma, &ns).unwrap();
        assert!(report.passed, "{:?}", report.failures);
        for slice in &report.slices {
            assert_eq!(slice.positions["S:c"].opponents, slice.n);
        }
        let centre = report.verdicts.iter().find(|v| v.position == "S:c").unwrap();
        assert_eq!(centre.verdict, Verdict::GrowingOpponents { c: 1, e: 0 });
        let leaf = report.verdicts.iter().find(|v| v.position == "0/x").unwrap();
        match leaf.verdict {
            Verdict::ExactHappy { n0 } => assert!(n0 <= 3),
            _ => panic!("leaf position should be exact-happy"),
        }
    }

    #[test]
    fn two_level_tree_passes() {
        let p = corpus::two_level_tree();
        let sigma = solved(&p);
        let ns: Vec<u64> = (1..=6).collect();
        let report = cross_validate(&p, &sigma, &ns).unwrap();
        assert!(report.passed, "{:?}", report.failures);
        for slice in &report.slices {
            assert!(slice.positions["S:s"].opponents >= slice.n);
            assert!(slice.positions["0/S:c"].opponents >= slice.n);
        }
    }

    #[test]
    fn n_zero_is_vacuous() {
        let p = corpus::omega_star();
        let sigma = solved(&p);
        let report = cross_validate(&p, &sigma, &[0]).unwrap();
        assert!(report.passed, "{:?}", report.failures);
    }

    #[test]
    fn unrealized_exception_warns() {
        let p = corpus::omega_star();
        let text = r#"{"s_colours":{"c":0},
            "families":[{"default":{"leaf_colours":{"x":1}},
                         "exceptions":{"5":{"leaf_colours":{"x":1}}}}]}"#;
        let sigma: SymbolicPartition = serde_json::from_str(text).unwrap();
        let report = cross_validate(&p, &sigma, &[2, 8]).unwrap();
        assert!(report.warnings.iter().any(|w| w.contains("n=2") && w.contains("0[5]")));
        assert!(report.passed, "{:?}", report.failures);
    }

    #[test]
    fn rejects_partition_failing_symbolic_check() {
        let p = corpus::omega_star();
        let bad: SymbolicPartition = serde_json::from_str(
            r#"{"s_colours":{"c":0},"families":[{"default":{"leaf_colours":{"x":0}},"exceptions":{}}]}"#,
        )
        .unwrap();
        assert!(matches!(cross_validate(&p, &bad, &[1, 2]), Err(Error::Input(_))));
    }

    #[test]
    fn instantiated_colouring_is_total() {
        let p = corpus::depth3_mixed();
        let sigma = solved(&p);
        let (graph, _) = presentation::instantiate(&p, 3).unwrap();
        let (colours, warnings) = instantiate_partition(&p, &sigma, 3).unwrap();
        assert!(warnings.is_empty());
        for v in graph.vertices() {
            assert!(colours.contains_key(v), "missing colour for {v}");
        }
    }
}
