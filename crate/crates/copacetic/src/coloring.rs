//! Constructive coloring algorithms: extension of a valid coloring from a
//! path-closed domain to the whole forest, coloring of the connecting path
//! between two distant colored sets, interpolation of several distant
//! colored sets, and an exhaustive-search oracle.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::axioms::{check_c4_coloring, is_connected, ViolationReport};
use crate::error::CoreError;
use crate::forest::{Distance, Forest, VertexId};
use crate::structure::C4Coloring;
use crate::variant::{Color, TheoryVariant};

/// Default vertex cap for the exhaustive oracle.
pub const DEFAULT_VERTEX_CAP: usize = 14;

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ColoringError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("coloring domain differs from the supplied closed domain")]
    DomainMismatch,
    #[error("domain is not path-closed: escapes via `{via}`")]
    DomainNotPathClosed { via: VertexId },
    #[error("input coloring is not valid:\n{0}")]
    InvalidColoring(ViolationReport),
    #[error("input vertex set is not connected")]
    SetNotConnected,
    #[error("no path between the two sets")]
    Disconnected,
    #[error("connecting path has length {distance}, need at least 5")]
    DistanceTooSmall { distance: u64 },
    #[error("set distance {found} does not exceed {required}")]
    DistanceNotExceeding { required: u64, found: Distance },
    #[error("variant not supported by the path coloring rules")]
    UnsupportedVariant,
    #[error("{count} vertices exceed the enumeration cap {cap}")]
    VertexCapExceeded { count: usize, cap: usize },
    #[error("internal invariant breach: {0}")]
    InternalInvariant(String),
}

/// A domain is path-closed iff, within each forest component, its vertices
/// induce a connected subgraph. Returns a vertex outside the domain that an
/// inside path runs through, when one exists.
fn path_closure_violation(f: &Forest, domain: &BTreeSet<VertexId>) -> Option<VertexId> {
    // Induced components of the domain.
    let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
    let mut reps: Vec<&VertexId> = Vec::new();
    for v in domain {
        if seen.contains(v) {
            continue;
        }
        reps.push(v);
        let mut stack = vec![v];
        seen.insert(v);
        while let Some(x) = stack.pop() {
            for y in f.neighbors(x).unwrap().keys() {
                if domain.contains(y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    // Two induced components inside one forest component witness an escape.
    for (i, u) in reps.iter().enumerate() {
        for v in &reps[i + 1..] {
            if let Some(path) = f.unique_path(u, v).unwrap() {
                if let Some(via) = path.iter().find(|x| !domain.contains(*x)) {
                    return Some(via.clone());
                }
            }
        }
    }
    None
}

fn validate_coloring(
    f: &Forest,
    col: &C4Coloring,
    variant: &TheoryVariant,
) -> Result<(), ColoringError> {
    let report = check_c4_coloring(f, col, variant)?;
    if report.is_empty() {
        Ok(())
    } else {
        Err(ColoringError::InvalidColoring(report))
    }
}

/// Extend a valid coloring of a path-closed domain to a total coloring of
/// the forest.
///
/// The complement decomposes into components, each attached to the domain
/// at most once. Every component is rooted (at its attachment if present,
/// otherwise at its least vertex) and colored top-down: each vertex gets
/// the smallest color distinct from the color of the edge to its parent,
/// the root next to the domain gets the smallest color distinct from its
/// attaching edge, and a free root gets the smallest color.
pub fn extend_coloring(
    f: &Forest,
    closed_domain: &BTreeSet<VertexId>,
    col: &C4Coloring,
    variant: &TheoryVariant,
) -> Result<C4Coloring, ColoringError> {
    for v in closed_domain {
        if !f.contains(v) {
            return Err(CoreError::UnknownVertex(v.as_str().to_owned()).into());
        }
    }
    if &col.domain() != closed_domain {
        return Err(ColoringError::DomainMismatch);
    }
    if let Some(via) = path_closure_violation(f, closed_domain) {
        return Err(ColoringError::DomainNotPathClosed { via });
    }
    validate_coloring(f, col, variant)?;

    let mut out = col.clone();
    let mut assigned: BTreeSet<VertexId> = closed_domain.clone();

    for start in f.vertices() {
        if assigned.contains(start) {
            continue;
        }
        // Collect this complement component.
        let mut comp: BTreeSet<VertexId> = BTreeSet::new();
        let mut stack = vec![start.clone()];
        comp.insert(start.clone());
        while let Some(x) = stack.pop() {
            for y in f.neighbors(&x).unwrap().keys() {
                if !closed_domain.contains(y) && !comp.contains(y) && comp.insert(y.clone()) {
                    stack.push(y.clone());
                }
            }
        }
        // At most one attachment pair (component vertex, domain neighbor);
        // guaranteed by path-closure of the domain.
        let mut attachment: Option<(VertexId, Color)> = None;
        for x in &comp {
            for (w, ec) in f.neighbors(x).unwrap() {
                if closed_domain.contains(w) {
                    if attachment.is_some() {
                        return Err(ColoringError::InternalInvariant(
                            "multiple attachments from one complement component".into(),
                        ));
                    }
                    attachment = Some((x.clone(), *ec));
                }
            }
        }
        let (root, root_color) = match &attachment {
            Some((x, ec)) => (x.clone(), variant.smallest_other(*ec)),
            None => (
                comp.iter().next().unwrap().clone(),
                Color::new(1).unwrap(),
            ),
        };
        out.set(root.clone(), root_color);
        assigned.insert(root.clone());
        let mut queue = VecDeque::new();
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            for (y, ec) in f.neighbors(&x).unwrap() {
                if comp.contains(y) && !assigned.contains(y) {
                    out.set(y.clone(), variant.smallest_other(*ec));
                    assigned.insert(y.clone());
                    queue.push_back(y.clone());
                }
            }
        }
    }

    debug_assert!(check_c4_coloring(f, &out, variant).unwrap().is_empty());
    Ok(out)
}

/// Color the connecting path between two distant colored connected sets.
///
/// Two-color rule: the path vertices next to the sets get the color
/// distinct from their attaching edge, everything between gets color 2.
/// Three-color rule: the path vertices next to the sets get the smallest
/// color distinct from their attaching edge; interior vertices are chosen
/// greedily so that within each parity class every vertex differs in color
/// from its predecessor two steps back, and the last one also differs from
/// its already-fixed successor two steps ahead.
pub fn path_coloring(
    f: &Forest,
    o1: &BTreeSet<VertexId>,
    o2: &BTreeSet<VertexId>,
    col1: &C4Coloring,
    col2: &C4Coloring,
    variant: &TheoryVariant,
) -> Result<C4Coloring, ColoringError> {
    let std = TheoryVariant::standard();
    let triple = TheoryVariant::triple();
    if variant != &std && variant != &triple {
        return Err(ColoringError::UnsupportedVariant);
    }
    if &col1.domain() != o1 || &col2.domain() != o2 {
        return Err(ColoringError::DomainMismatch);
    }
    if !is_connected(f, o1)? || !is_connected(f, o2)? {
        return Err(ColoringError::SetNotConnected);
    }
    validate_coloring(f, col1, variant)?;
    validate_coloring(f, col2, variant)?;

    let Some(path) = f.path_between_sets(o1, o2)? else {
        return Err(ColoringError::Disconnected);
    };
    let n = path.len() - 1;
    if n < 5 {
        return Err(ColoringError::DistanceTooSmall { distance: n as u64 });
    }
    debug_assert!(path[1..n].iter().all(|v| !o1.contains(v) && !o2.contains(v)));

    let mut out = col1.merge(col2).map_err(ColoringError::Core)?;
    let edge = |i: usize| f.edge_color(&path[i], &path[i + 1]).unwrap().unwrap();

    // Vertices next to the sets: distinct from the attaching edge color.
    out.set(path[1].clone(), variant.smallest_other(edge(0)));
    out.set(path[n - 1].clone(), variant.smallest_other(edge(n - 1)));

    if variant == &std {
        let two = Color::new(2).unwrap();
        for v in &path[2..n - 1] {
            out.set(v.clone(), two);
        }
    } else {
        for j in 2..=n - 2 {
            let mut avoid = vec![out.get(&path[j - 2]).unwrap()];
            if j + 2 > n - 2 {
                avoid.push(out.get(&path[j + 2]).unwrap());
            }
            let color = variant
                .smallest_outside(&avoid)
                .ok_or_else(|| {
                    ColoringError::InternalInvariant("no admissible interior color".into())
                })?;
            out.set(path[j].clone(), color);
        }
    }

    let report = check_c4_coloring(f, &out, variant)?;
    if !report.is_empty() {
        return Err(ColoringError::InternalInvariant(format!(
            "path coloring failed validity:\n{report}"
        )));
    }
    Ok(out)
}

/// Merge several distant colored connected sets into one valid coloring on
/// a path-closed superset restricting to every input.
///
/// Inputs must be pairwise farther apart than `2^n` for `n` the number of
/// sets. The minimum-distance pair is merged along its connecting path;
/// afterwards every remaining pairwise distance must still exceed half the
/// merged distance, which keeps the recursion precondition intact. A breach
/// of that internal bound reports as an invariant breach, distinct from an
/// input error.
pub fn interpolate_colorings(
    f: &Forest,
    sets: &[(BTreeSet<VertexId>, C4Coloring)],
    variant: &TheoryVariant,
) -> Result<(BTreeSet<VertexId>, C4Coloring), ColoringError> {
    let mut work: Vec<(BTreeSet<VertexId>, C4Coloring)> = Vec::new();
    for (set, col) in sets {
        if &col.domain() != set {
            return Err(ColoringError::DomainMismatch);
        }
        if set.is_empty() {
            continue;
        }
        if !is_connected(f, set)? {
            return Err(ColoringError::SetNotConnected);
        }
        validate_coloring(f, col, variant)?;
        work.push((set.clone(), col.clone()));
    }

    let n = work.len() as u32;
    let threshold = 2u64.checked_pow(n).ok_or_else(|| {
        ColoringError::InternalInvariant("too many sets for the distance threshold".into())
    })?;
    for i in 0..work.len() {
        for j in i + 1..work.len() {
            let d = f.distance_between_sets(&work[i].0, &work[j].0)?;
            if !d.exceeds(threshold) {
                return Err(ColoringError::DistanceNotExceeding {
                    required: threshold,
                    found: d,
                });
            }
        }
    }

    while work.len() >= 2 {
        // Minimum finite-distance pair; if none, the sets live in distinct
        // components and their union already interpolates them.
        let mut best: Option<(usize, usize, u64)> = None;
        for i in 0..work.len() {
            for j in i + 1..work.len() {
                if let Distance::Finite(d) = f.distance_between_sets(&work[i].0, &work[j].0)? {
                    if best.map(|(_, _, bd)| d < bd).unwrap_or(true) {
                        best = Some((i, j, d));
                    }
                }
            }
        }
        let Some((i, j, d)) = best else {
            break;
        };
        let merged_col = path_coloring(f, &work[i].0, &work[j].0, &work[i].1, &work[j].1, variant)?;
        let merged_set = merged_col.domain();
        let (si, sj) = (i.min(j), i.max(j));
        work.remove(sj);
        work.remove(si);
        for (other, _) in &work {
            let dist = f.distance_between_sets(&merged_set, other)?;
            let ok = match dist {
                Distance::Finite(x) => 2 * x > d,
                Distance::Infinite => true,
            };
            if !ok {
                return Err(ColoringError::InternalInvariant(format!(
                    "distance {dist} to merged set does not exceed {d}/2"
                )));
            }
        }
        work.push((merged_set, merged_col));
    }

    let mut set = BTreeSet::new();
    let mut col = C4Coloring::new();
    for (s, c) in work {
        set.extend(s);
        col = col.merge(&c).map_err(ColoringError::Core)?;
    }
    Ok((set, col))
}

/// All total valid colorings extending the constraints, in lexicographic
/// order over (vertex, color) in ascending vertex order. Exhaustive-search
/// oracle, capped.
pub fn brute_force_colorings(
    f: &Forest,
    constraints: &C4Coloring,
    variant: &TheoryVariant,
) -> Result<Vec<C4Coloring>, ColoringError> {
    brute_force_colorings_capped(f, constraints, variant, DEFAULT_VERTEX_CAP)
}

pub fn brute_force_colorings_capped(
    f: &Forest,
    constraints: &C4Coloring,
    variant: &TheoryVariant,
    cap: usize,
) -> Result<Vec<C4Coloring>, ColoringError> {
    if f.vertex_count() > cap {
        return Err(ColoringError::VertexCapExceeded {
            count: f.vertex_count(),
            cap,
        });
    }
    for (v, c) in constraints.iter() {
        if !f.contains(v) {
            return Err(CoreError::UnknownVertex(v.as_str().to_owned()).into());
        }
        if !variant.contains(c) {
            return Err(CoreError::ColorOutOfRange {
                color: c.get(),
                k: variant.color_count(),
            }
            .into());
        }
    }
    if !check_c4_coloring(f, constraints, variant)?.is_empty() {
        return Ok(Vec::new());
    }

    let order: Vec<VertexId> = f
        .vertices()
        .filter(|v| constraints.get(v).is_none())
        .cloned()
        .collect();
    let mut out = Vec::new();
    let mut partial = constraints.clone();
    search(f, variant, &order, 0, &mut partial, &mut out);
    Ok(out)
}

fn search(
    f: &Forest,
    variant: &TheoryVariant,
    order: &[VertexId],
    idx: usize,
    partial: &mut C4Coloring,
    out: &mut Vec<C4Coloring>,
) {
    if idx == order.len() {
        out.push(partial.clone());
        return;
    }
    let v = &order[idx];
    'colors: for color in variant.colors() {
        // Capacity check localized to the balls `v` newly joins.
        for (m, ec) in f.neighbors(v).unwrap() {
            if *ec != color {
                continue;
            }
            let count = f
                .neighbors(m)
                .unwrap()
                .iter()
                .filter(|(_, mc)| **mc == color)
                .filter(|(w, _)| *w == v || partial.get(w) == Some(color))
                .count();
            if count > variant.capacity(color).unwrap() {
                continue 'colors;
            }
        }
        partial.set(v.clone(), color);
        search(f, variant, order, idx + 1, partial, out);
        partial.unset(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variant::TheoryVariant;

    fn vid(s: &str) -> VertexId {
        VertexId::new(s)
    }

    fn c(v: u8) -> Color {
        Color::new(v).unwrap()
    }

    fn bare_path(k: u8, colors: &[u8]) -> (Forest, Vec<VertexId>) {
        let mut f = Forest::new(k);
        let n = colors.len();
        let ids: Vec<VertexId> = (0..=n).map(|i| vid(&format!("o{i}"))).collect();
        for v in &ids {
            f.add_vertex(v.clone()).unwrap();
        }
        for (i, col) in colors.iter().enumerate() {
            f.add_edge(c(*col), &ids[i], &ids[i + 1]).unwrap();
        }
        (f, ids)
    }

    #[test]
    fn brute_force_single_vertex() {
        let mut f = Forest::new(2);
        f.add_vertex(vid("a")).unwrap();
        let all = brute_force_colorings(&f, &C4Coloring::new(), &TheoryVariant::standard())
            .unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn brute_force_single_edge() {
        // A lone edge has no unit ball with two boundary vertices, so all
        // four assignments are valid: the capacity bound constrains common
        // neighbors, not adjacent pairs.
        let (f, _) = bare_path(2, &[1]);
        let all = brute_force_colorings(&f, &C4Coloring::new(), &TheoryVariant::standard())
            .unwrap();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn brute_force_cherry_excludes_capacity_breach() {
        // x - m - y with both edges color 1: x and y share the ball at m,
        // so exactly the both-1 assignments on {x, y} drop out.
        let (f, ids) = bare_path(2, &[1, 1]);
        let all = brute_force_colorings(&f, &C4Coloring::new(), &TheoryVariant::standard())
            .unwrap();
        // 8 total assignments minus the two with x = y = 1.
        assert_eq!(all.len(), 6);
        assert!(all
            .iter()
            .all(|col| !(col.get(&ids[0]) == Some(c(1)) && col.get(&ids[2]) == Some(c(1)))));
    }

    #[test]
    fn brute_force_contradicting_constraints() {
        let (f, ids) = bare_path(2, &[1, 1]);
        let constraints: C4Coloring = [(ids[0].clone(), c(1)), (ids[2].clone(), c(1))]
            .into_iter()
            .collect();
        let all =
            brute_force_colorings(&f, &constraints, &TheoryVariant::standard()).unwrap();
        assert!(all.is_empty());
    }

    #[test]
    fn brute_force_cap() {
        let mut f = Forest::new(2);
        for i in 0..3 {
            f.add_vertex(vid(&format!("v{i}"))).unwrap();
        }
        assert!(matches!(
            brute_force_colorings_capped(&f, &C4Coloring::new(), &TheoryVariant::standard(), 2),
            Err(ColoringError::VertexCapExceeded { count: 3, cap: 2 })
        ));
    }

    #[test]
    fn extend_noop_on_full_domain() {
        let (f, ids) = bare_path(2, &[1]);
        let col: C4Coloring = [(ids[0].clone(), c(1)), (ids[1].clone(), c(2))]
            .into_iter()
            .collect();
        let out =
            extend_coloring(&f, &col.domain(), &col, &TheoryVariant::standard()).unwrap();
        assert_eq!(out, col);
    }

    #[test]
    fn extend_forces_neighbor_color() {
        // Single color-1 edge a-b, domain {a} colored 1: b must get 2.
        let (f, ids) = bare_path(2, &[1]);
        let col: C4Coloring = [(ids[0].clone(), c(1))].into_iter().collect();
        let out = extend_coloring(
            &f,
            &[ids[0].clone()].into(),
            &col,
            &TheoryVariant::standard(),
        )
        .unwrap();
        assert_eq!(out.get(&ids[1]), Some(c(2)));
    }

    #[test]
    fn extend_rejects_open_domain() {
        let (f, ids) = bare_path(2, &[1, 2]);
        let col: C4Coloring = [(ids[0].clone(), c(1)), (ids[2].clone(), c(1))]
            .into_iter()
            .collect();
        let err = extend_coloring(
            &f,
            &[ids[0].clone(), ids[2].clone()].into(),
            &col,
            &TheoryVariant::standard(),
        )
        .unwrap_err();
        assert!(matches!(err, ColoringError::DomainNotPathClosed { via } if via == ids[1]));
    }

    #[test]
    fn extend_matches_brute_force_on_small_forests() {
        // Extension output must be a member of the brute-force extension
        // set whenever preconditions hold.
        let (f, ids) = bare_path(2, &[1, 2, 1, 1]);
        let domain: BTreeSet<VertexId> = [ids[1].clone(), ids[2].clone()].into();
        let col: C4Coloring = [(ids[1].clone(), c(1)), (ids[2].clone(), c(2))]
            .into_iter()
            .collect();
        let std = TheoryVariant::standard();
        let out = extend_coloring(&f, &domain, &col, &std).unwrap();
        let all = brute_force_colorings(&f, &col, &std).unwrap();
        assert!(!all.is_empty());
        assert!(all.contains(&out));
    }

    #[test]
    fn path_coloring_two_color_interior() {
        // Distance 5, all edges color 1: every interior vertex gets 2.
        let (f, ids) = bare_path(2, &[1, 1, 1, 1, 1]);
        let col1: C4Coloring = [(ids[0].clone(), c(1))].into_iter().collect();
        let col2: C4Coloring = [(ids[5].clone(), c(1))].into_iter().collect();
        let out = path_coloring(
            &f,
            &[ids[0].clone()].into(),
            &[ids[5].clone()].into(),
            &col1,
            &col2,
            &TheoryVariant::standard(),
        )
        .unwrap();
        assert_eq!(out.domain().len(), 6);
        for i in 1..=4 {
            assert_eq!(out.get(&ids[i]), Some(c(2)));
        }
    }

    #[test]
    fn path_coloring_three_color_against_enumeration() {
        // Distance 5, all edges color 1, endpoints colored 1 and 2: the
        // greedy output must be among the enumerated valid assignments.
        let (f, ids) = bare_path(3, &[1, 1, 1, 1, 1]);
        let triple = TheoryVariant::triple();
        let col1: C4Coloring = [(ids[0].clone(), c(1))].into_iter().collect();
        let col2: C4Coloring = [(ids[5].clone(), c(2))].into_iter().collect();
        let out = path_coloring(
            &f,
            &[ids[0].clone()].into(),
            &[ids[5].clone()].into(),
            &col1,
            &col2,
            &triple,
        )
        .unwrap();
        let constraints: C4Coloring = [(ids[0].clone(), c(1)), (ids[5].clone(), c(2))]
            .into_iter()
            .collect();
        let all = brute_force_colorings(&f, &constraints, &triple).unwrap();
        assert!(!all.is_empty());
        assert!(all.contains(&out));
    }

    #[test]
    fn path_coloring_rejects_short_distance() {
        let (f, ids) = bare_path(2, &[1, 1, 1, 1]);
        let col1: C4Coloring = [(ids[0].clone(), c(1))].into_iter().collect();
        let col2: C4Coloring = [(ids[4].clone(), c(1))].into_iter().collect();
        let err = path_coloring(
            &f,
            &[ids[0].clone()].into(),
            &[ids[4].clone()].into(),
            &col1,
            &col2,
            &TheoryVariant::standard(),
        )
        .unwrap_err();
        assert!(matches!(err, ColoringError::DistanceTooSmall { distance: 4 }));
    }

    #[test]
    fn path_coloring_rejects_other_variants() {
        let (f, ids) = bare_path(2, &[1, 1, 1, 1, 1]);
        let v = TheoryVariant::new(vec![1, 1]).unwrap();
        let col1: C4Coloring = [(ids[0].clone(), c(1))].into_iter().collect();
        let col2: C4Coloring = [(ids[5].clone(), c(1))].into_iter().collect();
        let err = path_coloring(
            &f,
            &[ids[0].clone()].into(),
            &[ids[5].clone()].into(),
            &col1,
            &col2,
            &v,
        )
        .unwrap_err();
        assert!(matches!(err, ColoringError::UnsupportedVariant));
    }

    #[test]
    fn interpolate_singleton_is_identity() {
        let (f, ids) = bare_path(2, &[1]);
        let col: C4Coloring = [(ids[0].clone(), c(1))].into_iter().collect();
        let sets = vec![([ids[0].clone()].into(), col.clone())];
        let (set, out) = interpolate_colorings(&f, &sets, &TheoryVariant::standard()).unwrap();
        assert_eq!(set, [ids[0].clone()].into());
        assert_eq!(out, col);
    }

    #[test]
    fn interpolate_two_sets_equals_path_coloring() {
        let (f, ids) = bare_path(2, &[1, 2, 1, 2, 1]);
        let std = TheoryVariant::standard();
        let s1: BTreeSet<VertexId> = [ids[0].clone()].into();
        let s2: BTreeSet<VertexId> = [ids[5].clone()].into();
        let col1: C4Coloring = [(ids[0].clone(), c(2))].into_iter().collect();
        let col2: C4Coloring = [(ids[5].clone(), c(1))].into_iter().collect();
        let direct = path_coloring(&f, &s1, &s2, &col1, &col2, &std).unwrap();
        let (set, out) = interpolate_colorings(
            &f,
            &[(s1, col1), (s2, col2)],
            &std,
        )
        .unwrap();
        assert_eq!(out, direct);
        assert_eq!(set, direct.domain());
    }

    #[test]
    fn interpolate_rejects_close_sets() {
        let (f, ids) = bare_path(2, &[1, 1, 1, 1, 1]);
        // Two sets at distance 5, but 2^2 = 4 < 5 passes; use threshold
        // breach with three sets instead: distance 2 fails 2^3.
        let std = TheoryVariant::standard();
        let col = |i: usize, color: u8| -> (BTreeSet<VertexId>, C4Coloring) {
            (
                [ids[i].clone()].into(),
                [(ids[i].clone(), c(color))].into_iter().collect(),
            )
        };
        let err = interpolate_colorings(&f, &[col(0, 1), col(2, 1), col(5, 1)], &std)
            .unwrap_err();
        assert!(matches!(err, ColoringError::DistanceNotExceeding { .. }));
    }
}
