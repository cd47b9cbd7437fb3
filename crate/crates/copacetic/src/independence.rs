//! The independence relation over closed sets, the qf-type equality oracle,
//! inconsistency degrees of constraint families, and machine-checkable
//! certificates that the unique parameter type forks over the empty set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::closure::closure_of;
use crate::coloring::{brute_force_colorings_capped, ColoringError, DEFAULT_VERTEX_CAP};
use crate::construct::complete_budgeted;
use crate::error::CoreError;
use crate::forest::VertexId;
use crate::structure::{Embedding, ParamId, Structure, SubsetHandle};
use crate::variant::Color;

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum IndependenceError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("tuples differ in length or sort profile")]
    TupleMismatch,
    #[error("no unit color-{0} ball boundary of size capacity+1 through the target vertex")]
    MissingConfiguration(Color),
    #[error("family for color {color} has inconsistency degree {found:?}, expected {expected}")]
    DegreeAnomaly {
        color: Color,
        expected: usize,
        found: Option<usize>,
    },
    #[error("family members do not share a type over the empty set")]
    FamilyTypeMismatch,
    #[error("inputs are independent; no witness to extract")]
    InputsIndependent,
    #[error("dependence has no path witness")]
    NoPathWitness,
    #[error("certificate refuted: {0}")]
    CertificateRefuted(String),
}

/// An element of either sort.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Element {
    Vertex(VertexId),
    Param(ParamId),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Vertex(v) => write!(f, "vertex {v}"),
            Element::Param(p) => write!(f, "param {p}"),
        }
    }
}

/// Why two sets fail to be independent over a base: either their closures
/// share an element outside the base, or a path between the closures' O-parts
/// dodges the base.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DependenceWitness {
    SharedClosure { element: Element },
    Path { vertices: Vec<VertexId> },
}

impl fmt::Display for DependenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DependenceWitness::SharedClosure { element } => {
                write!(f, "shared closure element: {element}")
            }
            DependenceWitness::Path { vertices } => {
                write!(
                    f,
                    "path witness: {}",
                    vertices
                        .iter()
                        .map(|v| v.as_str())
                        .collect::<Vec<_>>()
                        .join("-")
                )
            }
        }
    }
}

struct DependenceScan {
    shared: Option<DependenceWitness>,
    path: Option<DependenceWitness>,
}

fn dependence_scan(
    s: &Structure,
    base: &SubsetHandle,
    left: &SubsetHandle,
    right: &SubsetHandle,
    budget: usize,
) -> Result<DependenceScan, IndependenceError> {
    base.validate(s)?;
    left.validate(s)?;
    right.validate(s)?;

    // Defensive completion pass, then everything happens in the completed
    // ambient. The base is replaced by its closure.
    let ambient = if budget == 0 {
        s.clone()
    } else {
        complete_budgeted(s, budget).map_err(|e| match e {
            crate::construct::ConstructError::Core(c) => IndependenceError::Core(c),
            other => IndependenceError::Core(CoreError::BadVariant(other.to_string())),
        })?
    };
    let base_cl = closure_of(&ambient, base, None)?;
    let left_cl = closure_of(&ambient, &base_cl.union(left), None)?;
    let right_cl = closure_of(&ambient, &base_cl.union(right), None)?;

    let mut shared = None;
    for p in left_cl.p_part.intersection(&right_cl.p_part) {
        if !base_cl.p_part.contains(p) {
            shared = Some(DependenceWitness::SharedClosure {
                element: Element::Param(p.clone()),
            });
            break;
        }
    }
    if shared.is_none() {
        for v in left_cl.o_part.intersection(&right_cl.o_part) {
            if !base_cl.o_part.contains(v) {
                shared = Some(DependenceWitness::SharedClosure {
                    element: Element::Vertex(v.clone()),
                });
                break;
            }
        }
    }

    // Path witness: a component of the base-deleted forest containing
    // vertices from both closures' non-base parts.
    let left_out: BTreeSet<&VertexId> = left_cl
        .o_part
        .iter()
        .filter(|v| !base_cl.o_part.contains(*v))
        .collect();
    let right_out: BTreeSet<&VertexId> = right_cl
        .o_part
        .iter()
        .filter(|v| !base_cl.o_part.contains(*v))
        .collect();
    let mut path = None;
    if !left_out.is_empty() && !right_out.is_empty() {
        let labels = base_deleted_components(&ambient, &base_cl.o_part);
        'outer: for u in &left_out {
            let Some(label) = labels.get(*u) else { continue };
            for w in &right_out {
                if *u != *w && labels.get(*w) == Some(label) {
                    let vertices = ambient
                        .forest()
                        .unique_path(u, w)?
                        .expect("same base-deleted component");
                    debug_assert!(vertices.iter().all(|x| !base_cl.o_part.contains(x)));
                    path = Some(DependenceWitness::Path { vertices });
                    break 'outer;
                }
            }
        }
    }

    Ok(DependenceScan { shared, path })
}

/// Label the components of the forest with the base's vertices deleted.
fn base_deleted_components(
    s: &Structure,
    base: &BTreeSet<VertexId>,
) -> BTreeMap<VertexId, usize> {
    let f = s.forest();
    let mut labels: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut next = 0usize;
    for start in f.vertices() {
        if base.contains(start) || labels.contains_key(start) {
            continue;
        }
        let label = next;
        next += 1;
        let mut stack = vec![start.clone()];
        labels.insert(start.clone(), label);
        while let Some(x) = stack.pop() {
            for y in f.neighbors(&x).unwrap().keys() {
                if !base.contains(y) && !labels.contains_key(y) {
                    labels.insert(y.clone(), label);
                    stack.push(y.clone());
                }
            }
        }
    }
    labels
}

/// Independence of two subsets over a base, computed on closures inside the
/// (optionally budget-completed) ambient structure. Returns a witness when
/// dependent: a shared closure element first, else a base-avoiding path.
pub fn independent(
    s: &Structure,
    base: &SubsetHandle,
    left: &SubsetHandle,
    right: &SubsetHandle,
    budget: usize,
) -> Result<(bool, Option<DependenceWitness>), IndependenceError> {
    let scan = dependence_scan(s, base, left, right, budget)?;
    match scan.shared.or(scan.path) {
        Some(witness) => Ok((false, Some(witness))),
        None => Ok((true, None)),
    }
}

/// The structured data behind a path-witnessed dependence: the endpoints in
/// the two closures, the path length, and its vertices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ForkingWitnessData {
    pub left_endpoint: VertexId,
    pub right_endpoint: VertexId,
    pub length: u64,
    pub path: Vec<VertexId>,
}

/// Extract the path data of a dependence; errors if the inputs are
/// independent or the dependence is witnessed only by shared closure
/// elements.
pub fn forking_witness(
    s: &Structure,
    base: &SubsetHandle,
    left: &SubsetHandle,
    right: &SubsetHandle,
    budget: usize,
) -> Result<ForkingWitnessData, IndependenceError> {
    let scan = dependence_scan(s, base, left, right, budget)?;
    if scan.shared.is_none() && scan.path.is_none() {
        return Err(IndependenceError::InputsIndependent);
    }
    match scan.path {
        Some(DependenceWitness::Path { vertices }) => Ok(ForkingWitnessData {
            left_endpoint: vertices.first().unwrap().clone(),
            right_endpoint: vertices.last().unwrap().clone(),
            length: vertices.len() as u64 - 1,
            path: vertices,
        }),
        _ => Err(IndependenceError::NoPathWitness),
    }
}

/// qf-type equality of two tuples over a base: search for a qf-isomorphism
/// between the closures of base+tuple fixing the base pointwise and mapping
/// the tuples coordinatewise.
pub fn same_type_over(
    s: &Structure,
    base: &SubsetHandle,
    t1: &[Element],
    t2: &[Element],
) -> Result<bool, IndependenceError> {
    if t1.len() != t2.len() {
        return Err(IndependenceError::TupleMismatch);
    }
    for (a, b) in t1.iter().zip(t2.iter()) {
        match (a, b) {
            (Element::Vertex(_), Element::Vertex(_)) => {}
            (Element::Param(_), Element::Param(_)) => {}
            _ => return Err(IndependenceError::TupleMismatch),
        }
    }
    base.validate(s)?;
    let handle_of = |t: &[Element]| -> SubsetHandle {
        let mut h = base.clone();
        for e in t {
            match e {
                Element::Vertex(v) => {
                    h.o_part.insert(v.clone());
                }
                Element::Param(p) => {
                    h.p_part.insert(p.clone());
                }
            }
        }
        h
    };
    let h1 = handle_of(t1);
    let h2 = handle_of(t2);
    h1.validate(s)?;
    h2.validate(s)?;
    let d1 = closure_of(s, &h1, None)?;
    let d2 = closure_of(s, &h2, None)?;
    if d1.o_part.len() != d2.o_part.len() || d1.p_part.len() != d2.p_part.len() {
        return Ok(false);
    }

    // Pinned part: base pointwise, tuples coordinatewise. Params are always
    // fully pinned because closures never add params.
    let mut vmap: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut pmap: BTreeMap<ParamId, ParamId> = BTreeMap::new();
    for v in &base.o_part {
        vmap.insert(v.clone(), v.clone());
    }
    for p in &base.p_part {
        pmap.insert(p.clone(), p.clone());
    }
    for (a, b) in t1.iter().zip(t2.iter()) {
        let consistent = match (a, b) {
            (Element::Vertex(v), Element::Vertex(w)) => {
                vmap.insert(v.clone(), w.clone()).map_or(true, |old| &old == w)
            }
            (Element::Param(p), Element::Param(q)) => {
                pmap.insert(p.clone(), q.clone()).map_or(true, |old| &old == q)
            }
            _ => unreachable!(),
        };
        if !consistent {
            return Ok(false);
        }
    }
    if pmap.len() != d1.p_part.len()
        || pmap.values().collect::<BTreeSet<_>>().len() != d2.p_part.len()
        || !pmap.values().all(|q| d2.p_part.contains(q))
    {
        return Ok(false);
    }
    // Pinned consistency, including injectivity.
    let pinned = Embedding {
        vertex_map: vmap.clone(),
        param_map: pmap.clone(),
    };
    if pinned.verify(s, s).is_err() {
        return Ok(false);
    }
    if !vmap.keys().all(|v| d1.o_part.contains(v))
        || !vmap.values().all(|w| d2.o_part.contains(w))
    {
        return Ok(false);
    }

    let free: Vec<VertexId> = d1
        .o_part
        .iter()
        .filter(|v| !vmap.contains_key(*v))
        .cloned()
        .collect();
    let used: BTreeSet<VertexId> = vmap.values().cloned().collect();
    let candidates: Vec<VertexId> = d2
        .o_part
        .iter()
        .filter(|w| !used.contains(*w))
        .cloned()
        .collect();
    let mut vmap = vmap;
    Ok(extend_iso(
        s,
        &pmap,
        &free,
        0,
        &candidates,
        &mut used.clone(),
        &mut vmap,
    ))
}

fn extend_iso(
    s: &Structure,
    pmap: &BTreeMap<ParamId, ParamId>,
    free: &[VertexId],
    idx: usize,
    candidates: &[VertexId],
    used: &mut BTreeSet<VertexId>,
    vmap: &mut BTreeMap<VertexId, VertexId>,
) -> bool {
    if idx == free.len() {
        return true;
    }
    let v = &free[idx];
    'cands: for w in candidates {
        if used.contains(w) {
            continue;
        }
        for (p, q) in pmap {
            if s.rho(p, v).unwrap() != s.rho(q, w).unwrap() {
                continue 'cands;
            }
        }
        for (u, fu) in vmap.iter() {
            if s.forest().edge_color(v, u).unwrap() != s.forest().edge_color(w, fu).unwrap() {
                continue 'cands;
            }
        }
        vmap.insert(v.clone(), w.clone());
        used.insert(w.clone());
        if extend_iso(s, pmap, free, idx + 1, candidates, used, vmap) {
            return true;
        }
        vmap.remove(v);
        used.remove(w);
    }
    false
}

/// Least `m <= cap` such that every `m`-subset of the constraints
/// `rho(., vertex) = color` is jointly unsatisfiable by a valid total
/// coloring of the forest; `None` if no such `m` exists. Backed by the
/// exhaustive coloring oracle.
pub fn inconsistency_degree(
    s: &Structure,
    family: &[(VertexId, Color)],
    cap: usize,
) -> Result<Option<usize>, IndependenceError> {
    inconsistency_degree_capped(s, family, cap, DEFAULT_VERTEX_CAP)
}

pub fn inconsistency_degree_capped(
    s: &Structure,
    family: &[(VertexId, Color)],
    cap: usize,
    vertex_cap: usize,
) -> Result<Option<usize>, IndependenceError> {
    let colorings = brute_force_colorings_capped(
        s.forest(),
        &Default::default(),
        s.variant(),
        vertex_cap,
    )?;
    for (v, c) in family {
        if !s.forest().contains(v) {
            return Err(CoreError::UnknownVertex(v.as_str().to_owned()).into());
        }
        if !s.variant().contains(*c) {
            return Err(CoreError::ColorOutOfRange {
                color: c.get(),
                k: s.variant().color_count(),
            }
            .into());
        }
    }
    // Satisfying-coloring index set per constraint.
    let sat: Vec<BTreeSet<usize>> = family
        .iter()
        .map(|(v, c)| {
            colorings
                .iter()
                .enumerate()
                .filter(|(_, col)| col.get(v) == Some(*c))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    for m in 1..=cap.min(family.len()) {
        if every_subset_unsat(&sat, m) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn every_subset_unsat(sat: &[BTreeSet<usize>], m: usize) -> bool {
    fn rec(sat: &[BTreeSet<usize>], start: usize, left: usize, acc: Option<BTreeSet<usize>>) -> bool {
        if left == 0 {
            return acc.map(|s| s.is_empty()).unwrap_or(false);
        }
        for i in start..=sat.len() - left {
            let next = match &acc {
                None => sat[i].clone(),
                Some(a) => a.intersection(&sat[i]).cloned().collect(),
            };
            if !rec(sat, i + 1, left - 1, Some(next)) {
                return false;
            }
        }
        true
    }
    rec(sat, 0, m, None)
}

/// One per-color family of a forking certificate: vertices sharing a common
/// color-`color` neighbor, jointly unsatisfiable in every `degree`-subset.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FamilyCertificate {
    pub color: Color,
    pub center: VertexId,
    pub members: BTreeSet<VertexId>,
    pub degree: usize,
}

/// Machine-checkable record that the unique parameter type forks over the
/// empty set: one inconsistent family per color, covering the totality
/// disjunction at the target vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ForkingCertificate {
    pub target: VertexId,
    /// Configured neighborhood radius for the type-equality gate; recorded
    /// for reproducibility.
    pub radius: u32,
    pub families: Vec<FamilyCertificate>,
}

/// Build the certificate for a target vertex: for every color, a unit ball
/// boundary through the target with `capacity + 1` or more vertices, whose
/// tagged constraint family has inconsistency degree exactly `capacity + 1`.
pub fn existence_failure_certificate(
    s: &Structure,
    target: &VertexId,
    radius: u32,
) -> Result<ForkingCertificate, IndependenceError> {
    existence_failure_certificate_capped(s, target, radius, DEFAULT_VERTEX_CAP)
}

pub fn existence_failure_certificate_capped(
    s: &Structure,
    target: &VertexId,
    radius: u32,
    vertex_cap: usize,
) -> Result<ForkingCertificate, IndependenceError> {
    if !s.forest().contains(target) {
        return Err(CoreError::UnknownVertex(target.as_str().to_owned()).into());
    }
    let mut families = Vec::new();
    for color in s.variant().colors() {
        let capacity = s.variant().capacity(color).unwrap();
        // Centers are neighbors of the target through a color edge whose
        // ball boundary is big enough; least qualifying center wins.
        let mut center = None;
        for (u, ec) in s.forest().neighbors(target)? {
            if *ec != color {
                continue;
            }
            if s.forest().ball_boundary(u, color)?.len() >= capacity + 1 {
                center = Some(u.clone());
                break;
            }
        }
        let Some(center) = center else {
            return Err(IndependenceError::MissingConfiguration(color));
        };
        let members = s.forest().ball_boundary(&center, color)?;
        // Pairwise type equality over the empty set stands in for the
        // indiscernibility of the family.
        let member_vec: Vec<&VertexId> = members.iter().collect();
        for (i, v) in member_vec.iter().enumerate() {
            for w in &member_vec[i + 1..] {
                let same = same_type_over(
                    s,
                    &SubsetHandle::empty(),
                    &[Element::Vertex((*v).clone())],
                    &[Element::Vertex((*w).clone())],
                )?;
                if !same {
                    return Err(IndependenceError::FamilyTypeMismatch);
                }
            }
        }
        let family: Vec<(VertexId, Color)> =
            members.iter().map(|v| (v.clone(), color)).collect();
        let expected = capacity + 1;
        let degree = inconsistency_degree_capped(s, &family, expected, vertex_cap)?;
        if degree != Some(expected) {
            return Err(IndependenceError::DegreeAnomaly {
                color,
                expected,
                found: degree,
            });
        }
        families.push(FamilyCertificate {
            color,
            center,
            members,
            degree: expected,
        });
    }
    Ok(ForkingCertificate {
        target: target.clone(),
        radius,
        families,
    })
}

/// Independent re-verification of a certificate against a structure. Trusts
/// nothing but the exhaustive coloring oracle: recomputes every family's
/// inconsistency degree and the totality coverage at the target.
pub fn verify_certificate(
    s: &Structure,
    cert: &ForkingCertificate,
    vertex_cap: usize,
) -> Result<(), IndependenceError> {
    let refuted = |msg: String| Err(IndependenceError::CertificateRefuted(msg));
    if !s.forest().contains(&cert.target) {
        return refuted(format!("target `{}` missing", cert.target));
    }
    // Coverage: exactly one family per color, so totality of any valid
    // coloring at the target picks out some family's constraint.
    let colors: BTreeSet<Color> = cert.families.iter().map(|f| f.color).collect();
    let all: BTreeSet<Color> = s.variant().colors().collect();
    if colors != all || cert.families.len() != all.len() {
        return refuted("families do not cover the colors exactly once".to_owned());
    }
    for fam in &cert.families {
        if !fam.members.contains(&cert.target) {
            return refuted(format!(
                "target not a member of the color-{} family",
                fam.color
            ));
        }
        let capacity = s.variant().capacity(fam.color).unwrap();
        if fam.degree != capacity + 1 {
            return refuted(format!(
                "family degree {} differs from capacity+1 = {}",
                fam.degree,
                capacity + 1
            ));
        }
        if fam.members.len() < capacity + 1 {
            return refuted(format!(
                "color-{} family has only {} members",
                fam.color,
                fam.members.len()
            ));
        }
        let family: Vec<(VertexId, Color)> =
            fam.members.iter().map(|v| (v.clone(), fam.color)).collect();
        let degree = inconsistency_degree_capped(s, &family, fam.degree, vertex_cap)?;
        if degree != Some(fam.degree) {
            return refuted(format!(
                "recomputed degree {degree:?} for color {} differs from {}",
                fam.color, fam.degree
            ));
        }
    }
    // Every valid coloring assigns the target some color, hence satisfies
    // one constraint of one family; each family is jointly unsatisfiable at
    // its degree. Check the totality claim by enumeration.
    let colorings =
        brute_force_colorings_capped(s.forest(), &Default::default(), s.variant(), vertex_cap)?;
    for col in &colorings {
        match col.get(&cert.target) {
            Some(c) if s.variant().contains(c) => {}
            _ => return refuted("a valid coloring misses the target".to_owned()),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::StructureBuilder;
    use crate::variant::TheoryVariant;

    fn vid(s: &str) -> VertexId {
        VertexId::new(s)
    }

    fn c(v: u8) -> Color {
        Color::new(v).unwrap()
    }

    /// The six-vertex two-color gadget: o-u, u-o2 in color 1; o-v, v-w1,
    /// v-w2 in color 2.
    pub(crate) fn std_gadget() -> Structure {
        StructureBuilder::new(TheoryVariant::standard())
            .vertex("o")
            .unwrap()
            .vertex("u")
            .unwrap()
            .vertex("o2")
            .unwrap()
            .vertex("v")
            .unwrap()
            .vertex("w1")
            .unwrap()
            .vertex("w2")
            .unwrap()
            .edge(1, "o", "u")
            .unwrap()
            .edge(1, "u", "o2")
            .unwrap()
            .edge(2, "o", "v")
            .unwrap()
            .edge(2, "v", "w1")
            .unwrap()
            .edge(2, "v", "w2")
            .unwrap()
            .build()
            .unwrap()
    }

    /// The seven-vertex three-color gadget: o-u_i in color i, u_i-o_i in
    /// color i, for i = 1, 2, 3.
    pub(crate) fn triple_gadget() -> Structure {
        let mut b = StructureBuilder::new(TheoryVariant::triple())
            .vertex("o")
            .unwrap();
        for i in 1..=3u8 {
            b = b
                .vertex(format!("u{i}").as_str())
                .unwrap()
                .vertex(format!("o{i}").as_str())
                .unwrap()
                .edge(i, "o", format!("u{i}").as_str())
                .unwrap()
                .edge(i, format!("u{i}").as_str(), format!("o{i}").as_str())
                .unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn independent_when_contained_in_base() {
        let s = std_gadget();
        let base = SubsetHandle::vertices([vid("o"), vid("u"), vid("o2")]);
        let sub = SubsetHandle::vertices([vid("o")]);
        let (ok, w) = independent(&s, &base, &sub, &base, 0).unwrap();
        assert!(ok);
        assert!(w.is_none());
    }

    #[test]
    fn adjacent_singletons_dependent_over_empty() {
        let s = std_gadget();
        let a = SubsetHandle::vertices([vid("o")]);
        let b = SubsetHandle::vertices([vid("u")]);
        let (ok, w) = independent(&s, &SubsetHandle::empty(), &a, &b, 0).unwrap();
        assert!(!ok);
        assert!(matches!(w, Some(DependenceWitness::Path { ref vertices }) if vertices.len() == 2));
    }

    #[test]
    fn forking_witness_path_data() {
        let s = std_gadget();
        let a = SubsetHandle::vertices([vid("o2")]);
        let b = SubsetHandle::vertices([vid("v")]);
        // o2 - u - o - v: length 3 with two interior vertices.
        let data = forking_witness(&s, &SubsetHandle::empty(), &a, &b, 0).unwrap();
        assert_eq!(data.length, 3);
        assert_eq!(data.path.len(), 4);
        assert_eq!(data.left_endpoint, vid("o2"));
        assert_eq!(data.right_endpoint, vid("v"));
    }

    #[test]
    fn forking_witness_requires_dependence() {
        let s = std_gadget();
        let a = SubsetHandle::vertices([vid("o")]);
        let err = forking_witness(
            &s,
            &SubsetHandle::vertices([vid("o")]),
            &a,
            &a,
            0,
        )
        .unwrap_err();
        assert!(matches!(err, IndependenceError::InputsIndependent));
    }

    #[test]
    fn same_type_reflexive_and_edge_sensitive() {
        // Star with two leaves on different edge colors and one twin pair.
        let s = StructureBuilder::new(TheoryVariant::standard())
            .vertex("center")
            .unwrap()
            .vertex("x")
            .unwrap()
            .vertex("y")
            .unwrap()
            .vertex("z")
            .unwrap()
            .edge(1, "center", "x")
            .unwrap()
            .edge(2, "center", "y")
            .unwrap()
            .edge(1, "center", "z")
            .unwrap()
            .build()
            .unwrap();
        let base = SubsetHandle::vertices([vid("center")]);
        let t = |name: &str| vec![Element::Vertex(vid(name))];
        assert!(same_type_over(&s, &base, &t("x"), &t("x")).unwrap());
        // Different attaching colors distinguish x and y.
        assert!(!same_type_over(&s, &base, &t("x"), &t("y")).unwrap());
        // Same attaching color: the transposition is an isomorphism.
        assert!(same_type_over(&s, &base, &t("x"), &t("z")).unwrap());
    }

    #[test]
    fn degrees_on_the_standard_gadget() {
        let s = std_gadget();
        // Two color-1 constraints with a common color-1 neighbor: degree 2.
        let f1 = vec![(vid("o"), c(1)), (vid("o2"), c(1))];
        assert_eq!(inconsistency_degree(&s, &f1, 4).unwrap(), Some(2));
        // Three color-2 constraints on the capacity-2 ball at v: degree 3.
        let f2 = vec![(vid("o"), c(2)), (vid("w1"), c(2)), (vid("w2"), c(2))];
        assert_eq!(inconsistency_degree(&s, &f2, 4).unwrap(), Some(3));
        // A single constraint on an isolated-ball vertex is always
        // satisfiable.
        let f3 = vec![(vid("o2"), c(2))];
        assert_eq!(inconsistency_degree(&s, &f3, 4).unwrap(), None);
    }

    #[test]
    fn certificate_on_standard_gadget() {
        let s = std_gadget();
        let cert = existence_failure_certificate(&s, &vid("o"), 2).unwrap();
        assert_eq!(cert.families.len(), 2);
        assert_eq!(cert.families[0].degree, 2);
        assert_eq!(cert.families[0].members, [vid("o"), vid("o2")].into());
        assert_eq!(cert.families[1].degree, 3);
        assert_eq!(
            cert.families[1].members,
            [vid("o"), vid("w1"), vid("w2")].into()
        );
        verify_certificate(&s, &cert, DEFAULT_VERTEX_CAP).unwrap();
    }

    #[test]
    fn certificate_on_triple_gadget() {
        let s = triple_gadget();
        let cert = existence_failure_certificate(&s, &vid("o"), 2).unwrap();
        assert_eq!(cert.families.len(), 3);
        for fam in &cert.families {
            assert_eq!(fam.degree, 2);
        }
        verify_certificate(&s, &cert, DEFAULT_VERTEX_CAP).unwrap();
    }

    #[test]
    fn certificate_missing_configuration() {
        // o2 has no color-2 edge at all: color 2 lacks its configuration.
        let s = std_gadget();
        let err = existence_failure_certificate(&s, &vid("o2"), 2).unwrap_err();
        assert!(matches!(err, IndependenceError::MissingConfiguration(col) if col == c(2)));
    }

    #[test]
    fn tampered_certificate_is_refuted() {
        let s = std_gadget();
        let mut cert = existence_failure_certificate(&s, &vid("o"), 2).unwrap();
        cert.families[0].degree = 1;
        assert!(matches!(
            verify_certificate(&s, &cert, DEFAULT_VERTEX_CAP),
            Err(IndependenceError::CertificateRefuted(_))
        ));
    }
}
