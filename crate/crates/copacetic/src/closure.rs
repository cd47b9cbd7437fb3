//! Closure images, the closure operator, and the two-sided closure
//! computation for independent pairs over a closed base.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::axioms::{check_closed, ViolationReport};
use crate::error::CoreError;
use crate::forest::{Forest, VertexId};
use crate::independence::{independent, DependenceWitness, IndependenceError};
use crate::structure::{ParamId, Structure, SubsetHandle};
use crate::variant::Color;

/// The color-`color` neighbors of `vertex` that `param` colors `color`; in a
/// copacetic structure there are at most `capacity(color)` of them. The set
/// is exposed unordered with a lexicographic indexing; no consumer depends
/// on the index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosureImageSet {
    pub param: ParamId,
    pub vertex: VertexId,
    pub color: Color,
    pub images: BTreeSet<VertexId>,
}

impl ClosureImageSet {
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Lexicographic stand-in for an arbitrary indexing choice.
    pub fn indexed(&self, j: usize) -> Option<&VertexId> {
        self.images.iter().nth(j)
    }
}

/// Exact image set of `(param, vertex, color)`.
pub fn closure_images(
    s: &Structure,
    param: &ParamId,
    vertex: &VertexId,
    color: Color,
) -> Result<ClosureImageSet, CoreError> {
    if !s.params().contains(param) {
        return Err(CoreError::UnknownParam(param.as_str().to_owned()));
    }
    let images = s
        .forest()
        .ball_boundary(vertex, color)?
        .into_iter()
        .filter(|w| s.rho(param, w).map(|c| c == color).unwrap_or(false))
        .collect();
    Ok(ClosureImageSet {
        param: param.clone(),
        vertex: vertex.clone(),
        color,
        images,
    })
}

/// Per-component Steiner hull of a vertex set: the union of the unique
/// ambient paths between its members. In a tree this is the union of the
/// paths from one anchor per component to every other member.
pub(crate) fn path_hull(
    f: &Forest,
    set: &BTreeSet<VertexId>,
) -> Result<BTreeSet<VertexId>, CoreError> {
    let mut hull: BTreeSet<VertexId> = set.clone();
    let mut anchors: Vec<&VertexId> = Vec::new();
    let mut seen_components: Vec<BTreeSet<VertexId>> = Vec::new();
    for v in set {
        if seen_components.iter().any(|c| c.contains(v)) {
            continue;
        }
        seen_components.push(f.component_of(v)?);
        anchors.push(v);
    }
    for (anchor, comp) in anchors.iter().zip(&seen_components) {
        for v in set {
            if v == *anchor || !comp.contains(v) {
                continue;
            }
            let path = f
                .unique_path(anchor, v)?
                .expect("members of one component are connected");
            hull.extend(path);
        }
    }
    Ok(hull)
}

/// Least fixpoint of the path step (add every vertex on the unique ambient
/// path between two members) and the image step (add every closure image of
/// a closure param at a member vertex).
///
/// The closure params are the handle's own params, or `param_filter` when
/// given; the filter realizes closures under a foreign param set. Params are
/// never added to the result.
pub fn closure_of(
    s: &Structure,
    seed: &SubsetHandle,
    param_filter: Option<&BTreeSet<ParamId>>,
) -> Result<SubsetHandle, CoreError> {
    seed.validate(s)?;
    let params: Vec<&ParamId> = match param_filter {
        Some(filter) => {
            for p in filter {
                if !s.params().contains(p) {
                    return Err(CoreError::UnknownParam(p.as_str().to_owned()));
                }
            }
            filter.iter().collect()
        }
        None => seed.p_part.iter().collect(),
    };

    let f = s.forest();
    let mut o_part = seed.o_part.clone();
    loop {
        let mut changed = false;
        let hull = path_hull(f, &o_part)?;
        if hull.len() > o_part.len() {
            o_part = hull;
            changed = true;
        }
        let snapshot: Vec<VertexId> = o_part.iter().cloned().collect();
        for p in &params {
            for a in &snapshot {
                for color in s.variant().colors() {
                    for image in closure_images(s, p, a, color)?.images {
                        if o_part.insert(image) {
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(SubsetHandle {
        o_part,
        p_part: seed.p_part.clone(),
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ClosureError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("hypothesis failure: {part} is not closed:\n{report}")]
    NotClosed { part: String, report: ViolationReport },
    #[error("hypothesis failure: base is not contained in both sides")]
    BaseNotContained,
    #[error("hypothesis failure: sides are dependent over the base: {witness}")]
    Dependent { witness: DependenceWitness },
    #[error(transparent)]
    Independence(#[from] IndependenceError),
}

/// Per-claim outcome of the two-sided closure computation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairStructureReport {
    /// The closure of the union equals the union of the one-sided closures.
    pub union_closure_matches: bool,
    pub union_closure: SubsetHandle,
    /// New vertices of a one-sided closure that fail to connect to that
    /// side's non-base part.
    pub disconnected_new_vertices: Vec<VertexId>,
    /// The left side stays closed inside its starred extension.
    pub left_closed_in_star: ViolationReport,
    pub right_closed_in_star: ViolationReport,
}

impl PairStructureReport {
    pub fn all_green(&self) -> bool {
        self.union_closure_matches
            && self.disconnected_new_vertices.is_empty()
            && self.left_closed_in_star.is_empty()
            && self.right_closed_in_star.is_empty()
    }
}

/// Closure of an independent pair over a closed base: each side closed
/// under the params of both sides, with the claim that together the starred
/// sides exhaust the closure of the union.
pub fn pair_structure(
    s: &Structure,
    base: &SubsetHandle,
    left: &SubsetHandle,
    right: &SubsetHandle,
) -> Result<(SubsetHandle, SubsetHandle, PairStructureReport), ClosureError> {
    for (name, part) in [("base", base), ("left", left), ("right", right)] {
        part.validate(s)?;
        let report = check_closed(part, s)?;
        if !report.is_empty() {
            return Err(ClosureError::NotClosed {
                part: name.to_owned(),
                report,
            });
        }
    }
    if !base.is_subset_of(left) || !base.is_subset_of(right) {
        return Err(ClosureError::BaseNotContained);
    }
    let (indep, witness) = independent(s, base, left, right, 0)?;
    if !indep {
        return Err(ClosureError::Dependent {
            witness: witness.expect("dependence carries a witness"),
        });
    }

    let both_params: BTreeSet<ParamId> = left.p_part.union(&right.p_part).cloned().collect();
    let left_star = closure_of(s, left, Some(&both_params))?;
    let right_star = closure_of(s, right, Some(&both_params))?;

    let union_closure = closure_of(s, &left.union(right), None)?;
    let star_union = left_star.union(&right_star);
    let union_closure_matches = union_closure == star_union;

    let mut disconnected_new_vertices = Vec::new();
    for (side, star) in [(left, &left_star), (right, &right_star)] {
        let outside_base: BTreeSet<&VertexId> = side.o_part.difference(&base.o_part).collect();
        for v in star.o_part.difference(&side.o_part) {
            let connected = outside_base
                .iter()
                .any(|u| s.forest().same_component(v, u));
            if !connected {
                disconnected_new_vertices.push(v.clone());
            }
        }
    }
    disconnected_new_vertices.sort();
    disconnected_new_vertices.dedup();

    let left_closed_in_star = check_closed(left, &s.induced(&left_star)?)?;
    let right_closed_in_star = check_closed(right, &s.induced(&right_star)?)?;

    let report = PairStructureReport {
        union_closure_matches,
        union_closure,
        disconnected_new_vertices,
        left_closed_in_star,
        right_closed_in_star,
    };
    Ok((left_star, right_star, report))
}

/// Closure image sets grouped over all colors, handy for callers walking
/// deficits.
pub fn all_closure_images(
    s: &Structure,
    param: &ParamId,
    vertex: &VertexId,
) -> Result<BTreeMap<Color, ClosureImageSet>, CoreError> {
    let mut out = BTreeMap::new();
    for color in s.variant().colors() {
        out.insert(color, closure_images(s, param, vertex, color)?);
    }
    Ok(out)
}
