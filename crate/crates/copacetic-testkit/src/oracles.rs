//! Brute-force oracles written straight from the axiom definitions. They
//! share nothing with the library's verifier implementations beyond the
//! elementary accessors.

use std::collections::{BTreeMap, BTreeSet};

use copacetic::structure::SubsetHandle;
use copacetic::variant::Color;
use copacetic::{Forest, ParamId, Structure, VertexId};

/// Outcome of the quantifier-expansion copaceticity check, keyed so it can
/// be diffed against the library verifier's report.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OracleVerdict {
    pub c1_ok: bool,
    pub c2_ok: bool,
    pub c3_ok: bool,
    pub c4_breaches: BTreeSet<(ParamId, VertexId, Color)>,
}

impl OracleVerdict {
    pub fn is_copacetic(&self) -> bool {
        self.c1_ok && self.c2_ok && self.c3_ok && self.c4_breaches.is_empty()
    }
}

/// Literal loop over all tuples per axiom.
pub fn copacetic_oracle(s: &Structure) -> OracleVerdict {
    let f = s.forest();
    let vertices: Vec<&VertexId> = f.vertices().collect();

    // C1: symmetric, irreflexive.
    let mut c1_ok = true;
    for u in &vertices {
        for v in &vertices {
            let uv = f.edge_color(u, v).unwrap();
            let vu = f.edge_color(v, u).unwrap();
            if uv != vu || (u == v && uv.is_some()) {
                c1_ok = false;
            }
        }
    }

    // C2: acyclicity via union-find edge counting.
    let mut parent: BTreeMap<&VertexId, &VertexId> = vertices.iter().map(|v| (*v, *v)).collect();
    fn find<'a>(parent: &mut BTreeMap<&'a VertexId, &'a VertexId>, mut x: &'a VertexId) -> &'a VertexId {
        while parent[x] != x {
            let up = parent[parent[x]];
            parent.insert(x, up);
            x = up;
        }
        x
    }
    let mut c2_ok = true;
    for (u, v, _) in f.edges() {
        let ru = find(&mut parent, u);
        let rv = find(&mut parent, v);
        if ru == rv {
            c2_ok = false;
        } else {
            parent.insert(ru, rv);
        }
    }

    // C3: rho total with exactly one in-range color.
    let mut c3_ok = true;
    for p in s.params() {
        for v in &vertices {
            match s.rho(p, v) {
                Ok(c) if s.variant().contains(c) => {}
                _ => c3_ok = false,
            }
        }
    }

    // C4: exists a (capacity+1)-subset of a unit ball boundary all colored
    // with the ball's color.
    let mut c4_breaches = BTreeSet::new();
    for p in s.params() {
        for center in &vertices {
            for color in s.variant().colors() {
                let cap = s.variant().capacity(color).unwrap();
                let boundary: Vec<&VertexId> = vertices
                    .iter()
                    .copied()
                    .filter(|w| f.edge_color(center, w).unwrap() == Some(color))
                    .filter(|w| s.rho(p, w).map(|c| c == color).unwrap_or(false))
                    .collect();
                if has_subset_of_size(&boundary, cap + 1) {
                    c4_breaches.insert((p.clone(), (*center).clone(), color));
                }
            }
        }
    }

    OracleVerdict {
        c1_ok,
        c2_ok,
        c3_ok,
        c4_breaches,
    }
}

fn has_subset_of_size(items: &[&VertexId], size: usize) -> bool {
    // Distinctness is inherited from the vertex set; an explicit witness
    // subset exists iff enough items do.
    items.len() >= size
}

/// All simple paths between two vertices, by general-graph DFS. In a forest
/// there is at most one, but the oracle does not assume that.
pub fn all_simple_paths(f: &Forest, from: &VertexId, to: &VertexId) -> Vec<Vec<VertexId>> {
    let mut out = Vec::new();
    let mut path = vec![from.clone()];
    let mut visited: BTreeSet<VertexId> = [from.clone()].into();
    dfs_paths(f, to, &mut path, &mut visited, &mut out);
    out
}

fn dfs_paths(
    f: &Forest,
    to: &VertexId,
    path: &mut Vec<VertexId>,
    visited: &mut BTreeSet<VertexId>,
    out: &mut Vec<Vec<VertexId>>,
) {
    let cur = path.last().unwrap().clone();
    if &cur == to {
        out.push(path.clone());
        return;
    }
    let neighbors: Vec<VertexId> = f.neighbors(&cur).unwrap().keys().cloned().collect();
    for next in neighbors {
        if visited.insert(next.clone()) {
            path.push(next.clone());
            dfs_paths(f, to, path, visited, out);
            path.pop();
            visited.remove(&next);
        }
    }
}

/// Closed-substructure check straight from the definition: image condition
/// by scanning every vertex, path condition over all simple paths.
pub fn closed_oracle(sub: &SubsetHandle, s: &Structure) -> bool {
    let f = s.forest();
    for p in &sub.p_part {
        for a in &sub.o_part {
            for color in s.variant().colors() {
                for w in f.vertices() {
                    if f.edge_color(a, w).unwrap() == Some(color)
                        && s.rho(p, w).unwrap() == color
                        && !sub.o_part.contains(w)
                    {
                        return false;
                    }
                }
            }
        }
    }
    for u in &sub.o_part {
        for v in &sub.o_part {
            if u >= v {
                continue;
            }
            for path in all_simple_paths(f, u, v) {
                if path.iter().any(|x| !sub.o_part.contains(x)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Least closed superset by enumeration: intersect every vertex superset of
/// the seed that satisfies both closedness conditions for the closure
/// params. Exponential in the complement size; callers cap instance sizes.
pub fn closure_oracle(
    s: &Structure,
    seed: &SubsetHandle,
    param_filter: Option<&BTreeSet<ParamId>>,
) -> BTreeSet<VertexId> {
    let f = s.forest();
    let params: Vec<&ParamId> = match param_filter {
        Some(filter) => filter.iter().collect(),
        None => seed.p_part.iter().collect(),
    };
    let complement: Vec<&VertexId> = f
        .vertices()
        .filter(|v| !seed.o_part.contains(*v))
        .collect();
    assert!(
        complement.len() <= 16,
        "closure oracle capped at 16 free vertices"
    );
    let mut intersection: Option<BTreeSet<VertexId>> = None;
    for mask in 0u32..(1 << complement.len()) {
        let mut set: BTreeSet<VertexId> = seed.o_part.clone();
        for (i, v) in complement.iter().enumerate() {
            if mask & (1 << i) != 0 {
                set.insert((*v).clone());
            }
        }
        if !subset_closed(s, &set, &params) {
            continue;
        }
        intersection = Some(match intersection {
            None => set,
            Some(acc) => acc.intersection(&set).cloned().collect(),
        });
    }
    intersection.expect("the full vertex set is closed")
}

fn subset_closed(s: &Structure, set: &BTreeSet<VertexId>, params: &[&ParamId]) -> bool {
    let f = s.forest();
    for u in set {
        for v in set {
            if u >= v {
                continue;
            }
            for path in all_simple_paths(f, u, v) {
                if path.iter().any(|x| !set.contains(x)) {
                    return false;
                }
            }
        }
    }
    for p in params {
        for a in set {
            for color in s.variant().colors() {
                for w in f.vertices() {
                    if f.edge_color(a, w).unwrap() == Some(color)
                        && s.rho(p, w).unwrap() == color
                        && !set.contains(w)
                    {
                        return false;
                    }
                }
            }
        }
    }
    true
}
