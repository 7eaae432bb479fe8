//! Acceptance gate: one pass/fail line per criterion.
//!
//! Each criterion is oracle-based: library results are compared against
//! independent brute-force computations done right here in test code.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use rayless::corpus;
use rayless::finite::{
    exact_max_cut_extension, extend_pre_partition, flip_cascade, unfriendly_partition,
    DEFAULT_MAX_CUT_BOUND,
};
use rayless::graph::{is_unfriendly, is_unfriendly_for, FiniteGraph, Partition, Side};
use rayless::presentation::{degree_atlas, is_in_w, minimal_separator, structural_rank, Presentation};
use rayless::rank::{bounded_rank, naive_bounded_rank, BaseFamily};
use rayless::symbolic::{check_symbolic, solve_unfriendly, witness_kapom, SolveConfig};
use rayless::xval::{cross_validate, Verdict};

fn criterion(n: usize, what: &str, run: impl FnOnce() -> Result<(), String>) {
    match run() {
        Ok(()) => println!("criterion {n}: pass - {what}"),
        Err(msg) => {
            println!("criterion {n}: FAIL - {what}: {msg}");
            panic!("criterion {n} failed: {msg}");
        }
    }
}

fn named_vertices(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

fn all_pairs(names: &[String]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            out.push((names[i].clone(), names[j].clone()));
        }
    }
    out
}

fn graph_from_mask(names: &[String], pairs: &[(String, String)], mask: u64) -> FiniteGraph {
    let edges = pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e.clone());
    FiniteGraph::new(names.iter().cloned(), edges).unwrap()
}

/// Every labelled graph on 1..=max vertices.
fn all_labelled_graphs(max: usize) -> Vec<FiniteGraph> {
    let mut out = Vec::new();
    for n in 1..=max {
        let names = named_vertices(n);
        let pairs = all_pairs(&names);
        for mask in 0..1u64 << pairs.len() {
            out.push(graph_from_mask(&names, &pairs, mask));
        }
    }
    out
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> FiniteGraph {
    let names = named_vertices(n);
    let edges: Vec<(String, String)> =
        all_pairs(&names).into_iter().filter(|_| rng.gen_bool(p)).collect();
    FiniteGraph::new(names, edges).unwrap()
}

fn mask_partition(g: &FiniteGraph, mask: u64) -> Partition {
    Partition::from_assignments(
        g.vertices()
            .enumerate()
            .map(|(i, v)| {
                (v.to_owned(), if mask >> i & 1 == 1 { Side::One } else { Side::Zero })
            })
            .collect(),
    )
}

#[test]
fn criterion_01_finite_existence() {
    criterion(1, "local search finds unfriendly partitions", || {
        let mut count = 0;
        for g in all_labelled_graphs(5) {
            let (pi, _) = unfriendly_partition(&g, None).map_err(|e| e.to_string())?;
            if !is_unfriendly(&g, &pi).map_err(|e| e.to_string())? {
                return Err(format!("not unfriendly on a {}-vertex graph", g.num_vertices()));
            }
            count += 1;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for i in 0..500 {
            let n = rng.gen_range(1..=8);
            let p = rng.gen_range(0.1..0.9);
            let g = random_graph(&mut rng, n, p);
            let (pi, _) = unfriendly_partition(&g, None).map_err(|e| e.to_string())?;
            if !is_unfriendly(&g, &pi).map_err(|e| e.to_string())? {
                return Err(format!("random instance {i} not unfriendly"));
            }
        }
        // Exhaustive labelled enumeration on 1..=5 vertices.
        assert_eq!(count, 1 + 2 + 8 + 64 + 1024);
        Ok(())
    });
}

#[test]
fn criterion_02_pre_partitionability() {
    criterion(2, "random pre-partitions always extend", || {
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        for i in 0..500 {
            let n = rng.gen_range(1..=10);
            let p = rng.gen_range(0.1..0.9);
            let g = random_graph(&mut rng, n, p);
            let mut fixed = Partition::new();
            let mut u = BTreeSet::new();
            for v in g.vertices() {
                if rng.gen_bool(0.3) {
                    u.insert(v.to_owned());
                    fixed.assign(
                        v.to_owned(),
                        if rng.gen_bool(0.5) { Side::One } else { Side::Zero },
                    );
                }
            }
            let (pi, _) = extend_pre_partition(&g, &fixed).map_err(|e| e.to_string())?;
            for v in &u {
                if pi.get(v) != fixed.get(v) {
                    return Err(format!("instance {i}: fixed vertex {v} was flipped"));
                }
            }
            let free: BTreeSet<String> =
                g.vertices().filter(|v| !u.contains(*v)).map(|v| v.to_owned()).collect();
            if !is_unfriendly_for(&g, &pi, &free).map_err(|e| e.to_string())? {
                return Err(format!("instance {i}: some free vertex unhappy"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_03_brute_force_oracle() {
    criterion(3, "exhaustive partition scan agrees on <=5 vertices", || {
        for g in all_labelled_graphs(5) {
            let n = g.num_vertices();
            let mut best_cut = 0;
            let mut exists = false;
            let mut max_cut_all_unfriendly = true;
            let mut cuts = Vec::with_capacity(1 << n);
            for mask in 0..1u64 << n {
                let pi = mask_partition(&g, mask);
                let cut = g.cut_size(&pi).map_err(|e| e.to_string())?;
                let unf = is_unfriendly(&g, &pi).map_err(|e| e.to_string())?;
                exists |= unf;
                best_cut = best_cut.max(cut);
                cuts.push((cut, unf));
            }
            for (cut, unf) in cuts {
                if cut == best_cut && !unf {
                    max_cut_all_unfriendly = false;
                }
            }
            if !exists {
                return Err("no unfriendly partition found by brute force".into());
            }
            if !max_cut_all_unfriendly {
                return Err("a max-cut partition is not unfriendly".into());
            }
            let pi = exact_max_cut_extension(&g, &Partition::new(), DEFAULT_MAX_CUT_BOUND)
                .map_err(|e| e.to_string())?;
            if g.cut_size(&pi).map_err(|e| e.to_string())? != best_cut {
                return Err("exact solver missed the max cut".into());
            }
            if !is_unfriendly(&g, &pi).map_err(|e| e.to_string())? {
                return Err("exact solver output not unfriendly".into());
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_04_flip_cascade_bound() {
    criterion(4, "flip cascades stay within 2k", || {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        for i in 0..200 {
            let n = rng.gen_range(2..=14);
            let p = rng.gen_range(0.1..0.7);
            let g = random_graph(&mut rng, n, p);
            let pi = exact_max_cut_extension(&g, &Partition::new(), 14)
                .map_err(|e| e.to_string())?;
            let to_flip: BTreeSet<String> = g
                .vertices()
                .filter(|_| rng.gen_bool(0.25))
                .map(|v| v.to_owned())
                .collect();
            if to_flip.is_empty() || to_flip.len() == n {
                continue;
            }
            let free: BTreeSet<String> = g
                .vertices()
                .filter(|v| !to_flip.contains(*v))
                .map(|v| v.to_owned())
                .collect();
            // flip_cascade errors out past 2k; success is the bound.
            let out = flip_cascade(&g, &pi, &to_flip, &free)
                .map_err(|e| format!("instance {i}: {e}"))?;
            if out.cascade_len > 2 * out.k {
                return Err(format!("instance {i}: {} > 2*{}", out.cascade_len, out.k));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_05_rank_values() {
    criterion(5, "bounded rank matches hand values and the naive oracle", || {
        let p7 = FiniteGraph::new(
            named_vertices(7),
            (0..6).map(|i| (format!("v{i}"), format!("v{}", i + 1))),
        )
        .unwrap();
        let k4 = FiniteGraph::new(named_vertices(4), all_pairs(&named_vertices(4))).unwrap();
        let edgeless = FiniteGraph::new(named_vertices(5), std::iter::empty()).unwrap();
        let rank_of = |g: &FiniteGraph| {
            bounded_rank(g, BaseFamily::Edgeless, 1, 16)
                .map_err(|e| e.to_string())
                .map(|r| r.map(|r| r.rank))
        };
        if rank_of(&p7)? != Some(2) {
            return Err("P7 rank is not 2".into());
        }
        if rank_of(&k4)? != Some(3) {
            return Err("K4 rank is not 3".into());
        }
        if rank_of(&edgeless)? != Some(0) {
            return Err("edgeless rank is not 0".into());
        }
        // Exhaustive agreement on <=5 vertices, sampled on 6..=8.
        for g in all_labelled_graphs(5) {
            let fast = rank_of(&g)?;
            if fast != naive_bounded_rank(&g, BaseFamily::Edgeless, 1) {
                return Err("memoized and naive ranks disagree on a small graph".into());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        for i in 0..300 {
            let n = rng.gen_range(6..=8);
            let p = rng.gen_range(0.1..0.9);
            let g = random_graph(&mut rng, n, p);
            let fast = rank_of(&g)?;
            if fast != naive_bounded_rank(&g, BaseFamily::Edgeless, 1) {
                return Err(format!("disagreement on random instance {i}"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_06_minimal_separators_infinite_degree() {
    criterion(6, "minimal separators contain only infinite-degree vertices", || {
        for (name, p) in corpus::all() {
            if structural_rank(&p) == 0 {
                continue;
            }
            let sep = minimal_separator(&p).map_err(|e| format!("{name}: {e}"))?;
            let atlas = degree_atlas(&p);
            for v in &sep {
                let info = &atlas.positions[&format!("S:{v}")];
                if !info.degree.is_omega() {
                    return Err(format!("{name}: separator vertex {v} has finite degree"));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_07_symbolic_solver_corpus() {
    criterion(7, "symbolic solve leaves no residual unhappy set", || {
        let cfg = SolveConfig::default();
        for (name, p) in corpus::all() {
            let (sigma, state) =
                solve_unfriendly(&p, &cfg).map_err(|e| format!("{name}: {e}"))?;
            if !state.residual_unhappy.is_empty() {
                return Err(format!("{name}: residual set {:?}", state.residual_unhappy));
            }
            let report = check_symbolic(&p, &sigma).map_err(|e| format!("{name}: {e}"))?;
            if !report.all_happy() {
                return Err(format!(
                    "{name}: checker found unhappy positions {:?}",
                    report.unhappy.iter().map(|u| &u.position).collect::<Vec<_>>()
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_08_cross_validation() {
    criterion(8, "finite instantiations confirm the limit semantics", || {
        let cfg = SolveConfig::default();
        let ns: Vec<u64> = (1..=8).collect();
        for (name, p) in corpus::all() {
            let (sigma, _) = solve_unfriendly(&p, &cfg).map_err(|e| format!("{name}: {e}"))?;
            let report =
                cross_validate(&p, &sigma, &ns).map_err(|e| format!("{name}: {e}"))?;
            if !report.passed {
                return Err(format!("{name}: {:?}", report.failures));
            }
            for v in &report.verdicts {
                match v.verdict {
                    Verdict::ExactHappy { n0 } => {
                        if n0 > 3 {
                            return Err(format!("{name}: {} has n0 = {n0} > 3", v.position));
                        }
                    }
                    Verdict::GrowingOpponents { c, .. } => {
                        if c < 1 {
                            return Err(format!("{name}: {} has c = 0", v.position));
                        }
                    }
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_09_atlas_worked_values() {
    criterion(9, "atlas reproduces the worked examples", || {
        use rayless::cardinal::{Finite, Omega};
        let star = corpus::omega_star();
        let t2 = corpus::two_level_tree();
        let a_star = degree_atlas(&star);
        let a_t2 = degree_atlas(&t2);
        if a_star.v_star_size != Finite(1) || !is_in_w(&star) {
            return Err("omega-star V*/W values wrong".into());
        }
        if a_t2.v_star_size != Omega || is_in_w(&t2) {
            return Err("T2 V*/W values wrong".into());
        }
        if structural_rank(&star) != 1 || structural_rank(&t2) != 2 {
            return Err("structural ranks wrong".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_10_kapom_witnesses() {
    criterion(10, "kapom witness groups beat the threshold strictly", || {
        let cfg = SolveConfig::default();
        for (name, p) in corpus::all() {
            let (s_graph, families) = match &p {
                Presentation::Glue { s, families } => (s, families),
                Presentation::Leaf { .. } => continue,
            };
            let (sigma, state) =
                solve_unfriendly(&p, &cfg).map_err(|e| format!("{name}: {e}"))?;
            for s in &state.s1 {
                let group =
                    witness_kapom(&p, &sigma, s).map_err(|e| format!("{name}/{s}: {e}"))?;
                // Recompute the inequality from scratch.
                let group_degree: u64 =
                    group.iter().map(|(i, _)| families[*i].attach_degree(s)).sum();
                let threshold: u64 = s_graph.degree(s) as u64
                    + families
                        .iter()
                        .filter(|f| f.multiplicity.is_finite())
                        .map(|f| f.multiplicity.finite_value().unwrap() * f.attach_degree(s))
                        .sum::<u64>();
                if group_degree <= threshold {
                    return Err(format!("{name}/{s}: {group_degree} <= {threshold}"));
                }
                let distinct: BTreeSet<&(usize, u64)> = group.iter().collect();
                if distinct.len() != group.len() {
                    return Err(format!("{name}/{s}: group repeats a copy"));
                }
            }
        }
        Ok(())
    });
}
