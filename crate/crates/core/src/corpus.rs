//! Named example presentations used by the CLI, the benches, and the
//! test suite.

use crate::cardinal::{Finite, Omega, SymbolicCardinal};
use crate::graph::FiniteGraph;
use crate::presentation::{CopyFamily, Presentation};

fn g(vertices: &[&str], edges: &[(&str, &str)]) -> FiniteGraph {
    FiniteGraph::new(
        vertices.iter().map(|s| s.to_string()),
        edges.iter().map(|(a, b)| (a.to_string(), b.to_string())),
    )
    .expect("corpus graphs are well-formed")
}

fn leaf(vertices: &[&str], edges: &[(&str, &str)]) -> Presentation {
    Presentation::Leaf { graph: g(vertices, edges) }
}

fn fam(
    multiplicity: SymbolicCardinal,
    child: Presentation,
    attachment: &[(&str, &str)],
) -> CopyFamily {
    CopyFamily {
        multiplicity,
        child,
        attachment: attachment.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    }
}

fn glue(s: FiniteGraph, families: Vec<CopyFamily>) -> Presentation {
    Presentation::Glue { s, families }
}

/// Star with centre `c` and omega many leaves.
pub fn omega_star() -> Presentation {
    glue(g(&["c"], &[]), vec![fam(Omega, leaf(&["x"], &[]), &[("c", "x")])])
}

/// Root `s` joined to omega many copies of the omega star.
pub fn two_level_tree() -> Presentation {
    glue(g(&["s"], &[]), vec![fam(Omega, omega_star(), &[("s", "c")])])
}

/// Plain triangle, no gluing.
pub fn leaf_triangle() -> Presentation {
    leaf(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")])
}

/// Path on five vertices, no gluing.
pub fn leaf_path5() -> Presentation {
    leaf(&["a", "b", "c", "d", "e"], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")])
}

/// Omega star whose centre carries one pendant separator vertex.
pub fn omega_star_pendant() -> Presentation {
    glue(g(&["c", "p"], &[("c", "p")]), vec![fam(Omega, leaf(&["x"], &[]), &[("c", "x")])])
}

/// Two disjoint omega stars sharing a presentation root.
pub fn double_star() -> Presentation {
    glue(
        g(&["s", "t"], &[]),
        vec![
            fam(Omega, leaf(&["x"], &[]), &[("s", "x")]),
            fam(Omega, leaf(&["y"], &[]), &[("t", "y")]),
        ],
    )
}

/// Omega many leaves each joined to both separator vertices.
pub fn shared_leaf_star() -> Presentation {
    glue(g(&["s", "t"], &[]), vec![fam(Omega, leaf(&["x"], &[]), &[("s", "x"), ("t", "x")])])
}

/// Omega many pendant edges hanging off the centre.
pub fn omega_star_edge_leaf() -> Presentation {
    glue(g(&["c"], &[]), vec![fam(Omega, leaf(&["u", "v"], &[("u", "v")]), &[("c", "u")])])
}

/// Omega many triangles through the centre.
pub fn omega_triangle_fan() -> Presentation {
    glue(
        g(&["c"], &[]),
        vec![fam(Omega, leaf(&["u", "v"], &[("u", "v")]), &[("c", "u"), ("c", "v")])],
    )
}

/// Omega star plus three extra pendant leaves on the centre.
pub fn omega_star_plus_finite() -> Presentation {
    glue(
        g(&["c"], &[]),
        vec![
            fam(Omega, leaf(&["x"], &[]), &[("c", "x")]),
            fam(Finite(3), leaf(&["y"], &[]), &[("c", "y")]),
        ],
    )
}

/// Triangle separator with an omega star on one corner.
pub fn s_triangle_core() -> Presentation {
    glue(
        g(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]),
        vec![fam(Omega, leaf(&["x"], &[]), &[("a", "x")])],
    )
}

/// Root joined to omega many copies of the two-level tree.
pub fn depth3_tower() -> Presentation {
    glue(g(&["r"], &[]), vec![fam(Omega, two_level_tree(), &[("r", "s")])])
}

/// Root with both plain leaves and whole omega stars attached.
pub fn mixed_depth() -> Presentation {
    glue(
        g(&["r"], &[]),
        vec![
            fam(Omega, leaf(&["x"], &[]), &[("r", "x")]),
            fam(Omega, omega_star(), &[("r", "c")]),
        ],
    )
}

/// Two omega families with different children on a single root vertex.
pub fn two_omega_fams_on_one_s() -> Presentation {
    glue(
        g(&["s"], &[]),
        vec![
            fam(Omega, leaf(&["x"], &[]), &[("s", "x")]),
            fam(Omega, leaf(&["u", "v"], &[("u", "v")]), &[("s", "u")]),
        ],
    )
}

/// Entirely finite gluing: an edge with four pendant leaves on one end.
pub fn finite_glue() -> Presentation {
    glue(g(&["s", "t"], &[("s", "t")]), vec![fam(Finite(4), leaf(&["x"], &[]), &[("s", "x")])])
}

/// An edge inside the separator, one end of infinite degree.
pub fn s_edge_with_omega() -> Presentation {
    glue(g(&["s", "t"], &[("s", "t")]), vec![fam(Omega, leaf(&["x"], &[]), &[("s", "x")])])
}

/// Each copy contributes two independent leaves to the centre.
pub fn omega_star_multi_attach() -> Presentation {
    glue(g(&["c"], &[]), vec![fam(Omega, leaf(&["x", "y"], &[]), &[("c", "x"), ("c", "y")])])
}

/// Omega many five-cycles pinned to the centre at one vertex.
pub fn big_leaf() -> Presentation {
    glue(
        g(&["c"], &[]),
        vec![fam(
            Omega,
            leaf(
                &["v0", "v1", "v2", "v3", "v4"],
                &[("v0", "v1"), ("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v0", "v4")],
            ),
            &[("c", "v0")],
        )],
    )
}

/// Omega many three-vertex paths pinned to the centre at an endpoint.
pub fn omega_of_paths() -> Presentation {
    glue(
        g(&["c"], &[]),
        vec![fam(
            Omega,
            leaf(&["p", "q", "r"], &[("p", "q"), ("q", "r")]),
            &[("c", "p")],
        )],
    )
}

/// Two independent omega-star towers on one root.
pub fn double_tower() -> Presentation {
    glue(
        g(&["r"], &[]),
        vec![
            fam(Omega, omega_star(), &[("r", "c")]),
            fam(Omega, omega_star(), &[("r", "c")]),
        ],
    )
}

/// Degenerate glue node: a path separator with no families at all.
pub fn glue_no_fams() -> Presentation {
    glue(g(&["a", "b", "c"], &[("a", "b"), ("b", "c")]), Vec::new())
}

/// Finite pendants next to an omega family of two-level trees.
pub fn depth3_mixed() -> Presentation {
    glue(
        g(&["r"], &[]),
        vec![
            fam(Finite(2), leaf(&["w"], &[]), &[("r", "w")]),
            fam(Omega, two_level_tree(), &[("r", "s")]),
        ],
    )
}

/// Every corpus presentation with its name.
pub fn all() -> Vec<(&'static str, Presentation)> {
    vec![
        ("omega_star", omega_star()),
        ("two_level_tree", two_level_tree()),
        ("leaf_triangle", leaf_triangle()),
        ("leaf_path5", leaf_path5()),
        ("omega_star_pendant", omega_star_pendant()),
        ("double_star", double_star()),
        ("shared_leaf_star", shared_leaf_star()),
        ("omega_star_edge_leaf", omega_star_edge_leaf()),
        ("omega_triangle_fan", omega_triangle_fan()),
        ("omega_star_plus_finite", omega_star_plus_finite()),
        ("s_triangle_core", s_triangle_core()),
        ("depth3_tower", depth3_tower()),
        ("mixed_depth", mixed_depth()),
        ("two_omega_fams_on_one_s", two_omega_fams_on_one_s()),
        ("finite_glue", finite_glue()),
        ("s_edge_with_omega", s_edge_with_omega()),
        ("omega_star_multi_attach", omega_star_multi_attach()),
        ("big_leaf", big_leaf()),
        ("omega_of_paths", omega_of_paths()),
        ("double_tower", double_tower()),
        ("glue_no_fams", glue_no_fams()),
        ("depth3_mixed", depth3_mixed()),
    ]
}

/// Look a corpus presentation up by name.
pub fn by_name(name: &str) -> Option<Presentation> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, p)| p)
}
