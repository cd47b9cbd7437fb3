//! Structure-building constructions: closure-image addition, free
//! amalgamation over a closed base, parameter introduction, long-path
//! component joining, budgeted completion, the seeded model forge, and the
//! three-way amalgam behind the independence theorem check.

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::axioms::{check_c4_coloring, check_closed, verify_copacetic, ViolationReport};
use crate::closure::{closure_images, closure_of};
use crate::coloring::{extend_coloring, interpolate_colorings, ColoringError};
use crate::error::CoreError;
use crate::forest::{Forest, VertexId};
use crate::independence::{independent, DependenceWitness, IndependenceError};
use crate::structure::{C4Coloring, Embedding, ParamId, Structure, SubsetHandle};
use crate::variant::Color;

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("capacity for color {color} at ({param}, {vertex}) is already full")]
    CapacityFull {
        param: ParamId,
        vertex: VertexId,
        color: Color,
    },
    #[error("`{0}` and `{1}` are already in one component")]
    SameComponent(VertexId, VertexId),
    #[error("path length bound {0} is below the minimum 3")]
    MinLenTooSmall(usize),
    #[error("input structure is not copacetic:\n{0}")]
    NotCopacetic(ViolationReport),
    #[error("{part} is not closed:\n{report}")]
    NotClosed { part: String, report: ViolationReport },
    #[error("params of the attached structure differ from the base's params")]
    ParamSetMismatch,
    #[error("base disagreement: {0}")]
    BaseMismatch(String),
    #[error("identifier `{0}` collides across the amalgamated structures")]
    IdCollision(String),
    #[error("hypothesis failure at {step}: {detail}")]
    Hypothesis { step: &'static str, detail: String },
}

impl From<IndependenceError> for ConstructError {
    fn from(e: IndependenceError) -> ConstructError {
        ConstructError::Hypothesis {
            step: "independence",
            detail: e.to_string(),
        }
    }
}

/// Deterministic fresh-identifier source: `<prefix>0`, `<prefix>1`, ...,
/// skipping anything already taken. The cursor persists across a batch so
/// repeated draws stay linear.
pub(crate) struct FreshIds {
    prefix: String,
    cursor: usize,
}

impl FreshIds {
    pub(crate) fn new(prefix: &str) -> FreshIds {
        FreshIds {
            prefix: prefix.to_owned(),
            cursor: 0,
        }
    }

    pub(crate) fn next_vertex(&mut self, s: &Structure) -> VertexId {
        loop {
            let candidate = VertexId::new(format!("{}{}", self.prefix, self.cursor));
            self.cursor += 1;
            if !s.forest().contains(&candidate) {
                return candidate;
            }
        }
    }

    pub(crate) fn next_vertex_avoiding(
        &mut self,
        s: &Structure,
        extra: &BTreeSet<VertexId>,
    ) -> VertexId {
        loop {
            let candidate = VertexId::new(format!("{}{}", self.prefix, self.cursor));
            self.cursor += 1;
            if !s.forest().contains(&candidate) && !extra.contains(&candidate) {
                return candidate;
            }
        }
    }

    pub(crate) fn next_param(&mut self, s: &Structure) -> ParamId {
        loop {
            let candidate = ParamId::new(format!("{}{}", self.prefix, self.cursor));
            self.cursor += 1;
            if !s.params().contains(&candidate) {
                return candidate;
            }
        }
    }
}

fn require_copacetic(s: &Structure, what: &str) -> Result<(), ConstructError> {
    let report = verify_copacetic(s);
    if report.is_empty() {
        Ok(())
    } else {
        Err(ConstructError::Hypothesis {
            step: "copaceticity",
            detail: format!("{what}:\n{report}"),
        })
    }
}

/// Add one fresh color-`color` neighbor of `vertex` that `param` colors
/// `color`; every other param colors the fresh vertex with the smallest
/// other color, which keeps the result copacetic.
pub fn add_closure_image(
    s: &Structure,
    param: &ParamId,
    vertex: &VertexId,
    color: Color,
) -> Result<(Structure, VertexId), ConstructError> {
    let mut out = s.clone();
    let mut ids = FreshIds::new("w");
    let fresh = add_closure_image_inplace(&mut out, param, vertex, color, &mut ids)?;
    Ok((out, fresh))
}

fn add_closure_image_inplace(
    s: &mut Structure,
    param: &ParamId,
    vertex: &VertexId,
    color: Color,
    ids: &mut FreshIds,
) -> Result<VertexId, ConstructError> {
    s.forest().check_color(color)?;
    let images = closure_images(s, param, vertex, color)?;
    let capacity = s.variant().capacity(color)?;
    if images.len() >= capacity {
        return Err(ConstructError::CapacityFull {
            param: param.clone(),
            vertex: vertex.clone(),
            color,
        });
    }
    let fresh = ids.next_vertex(s);
    let other = s.variant().smallest_other(color);
    let column: BTreeMap<ParamId, Color> = s
        .params()
        .iter()
        .map(|p| (p.clone(), if p == param { color } else { other }))
        .collect();
    s.push_vertex(fresh.clone(), &column)?;
    // Pendant edge: acyclic by construction.
    s.forest_mut().insert_edge_unchecked(color, vertex, &fresh);
    Ok(fresh)
}

/// Join two components by a fresh color-1 path of length `min_len + 1`;
/// every param colors every new vertex 2, which keeps the result copacetic.
pub fn connect_with_path(
    s: &Structure,
    from: &VertexId,
    to: &VertexId,
    min_len: usize,
) -> Result<Structure, ConstructError> {
    if min_len < 3 {
        return Err(ConstructError::MinLenTooSmall(min_len));
    }
    if !s.forest().contains(from) {
        return Err(CoreError::UnknownVertex(from.as_str().to_owned()).into());
    }
    if !s.forest().contains(to) {
        return Err(CoreError::UnknownVertex(to.as_str().to_owned()).into());
    }
    if s.forest().same_component(from, to) {
        return Err(ConstructError::SameComponent(from.clone(), to.clone()));
    }
    let mut out = s.clone();
    let mut ids = FreshIds::new("x");
    let one = Color::new(1).unwrap();
    let two = Color::new(2).unwrap();
    let column: BTreeMap<ParamId, Color> =
        out.params().iter().map(|p| (p.clone(), two)).collect();
    let mut prev = from.clone();
    for _ in 0..min_len {
        let fresh = ids.next_vertex(&out);
        out.push_vertex(fresh.clone(), &column)?;
        out.forest_mut().insert_edge_unchecked(one, &prev, &fresh);
        prev = fresh;
    }
    // Final edge joins the two components; distinctness was checked above.
    out.forest_mut().insert_edge_unchecked(one, &prev, to);
    debug_assert!(out.forest().validate().is_ok());
    Ok(out)
}

/// Fill every completeness deficit among the elements present at each round
/// start, for `depth` rounds. Growth is pendant-only: no path between
/// pre-existing vertices changes.
pub fn complete_budgeted(s: &Structure, depth: usize) -> Result<Structure, ConstructError> {
    let mut out = s.clone();
    let mut ids = FreshIds::new("w");
    let colors: Vec<Color> = s.variant().colors().collect();
    for _ in 0..depth {
        let vertices: Vec<VertexId> = out.forest().vertices().cloned().collect();
        let params: Vec<ParamId> = out.params().iter().cloned().collect();
        let mut any = false;
        for p in &params {
            for v in &vertices {
                let assigned = out.rho(p, v)?;
                for &color in &colors {
                    if color == assigned {
                        continue;
                    }
                    let need = out.variant().capacity(color)?;
                    loop {
                        let have = closure_images(&out, p, v, color)?.len();
                        if have >= need {
                            break;
                        }
                        add_closure_image_inplace(&mut out, p, v, color, &mut ids)?;
                        any = true;
                    }
                }
            }
        }
        if !any {
            break;
        }
    }
    Ok(out)
}

/// Free amalgam of `a` and `b` over a common part `base` (a handle into
/// `a`, also present in `b` with the same induced structure and closed
/// there). No edges cross the two sides; rows of `a`-only params extend
/// over `b`'s new vertices by coloring extension from their base
/// restriction. Both returned embeddings are identities.
pub fn free_amalgam(
    a: &Structure,
    base: &SubsetHandle,
    b: &Structure,
) -> Result<(Structure, Embedding, Embedding), ConstructError> {
    require_copacetic(a, "left structure")?;
    require_copacetic(b, "right structure")?;
    let mut out = a.clone();
    free_amalgam_inplace(&mut out, base, b)?;
    let report = verify_copacetic(&out);
    if !report.is_empty() {
        return Err(ConstructError::NotCopacetic(report));
    }
    Ok((
        out,
        Embedding::identity(&a.full_handle()),
        Embedding::identity(&b.full_handle()),
    ))
}

fn free_amalgam_inplace(
    a: &mut Structure,
    base: &SubsetHandle,
    b: &Structure,
) -> Result<(), ConstructError> {
    base.validate(a)?;
    if a.variant() != b.variant() {
        return Err(CoreError::VariantMismatch.into());
    }
    if b.params() != &base.p_part {
        return Err(ConstructError::ParamSetMismatch);
    }
    for v in &base.o_part {
        if !b.forest().contains(v) {
            return Err(ConstructError::BaseMismatch(format!(
                "base vertex `{v}` missing from the attached structure"
            )));
        }
    }
    // The base must carry the same induced structure on both sides.
    for u in &base.o_part {
        for v in &base.o_part {
            if u >= v {
                continue;
            }
            if a.forest().edge_color(u, v)? != b.forest().edge_color(u, v)? {
                return Err(ConstructError::BaseMismatch(format!(
                    "edge `{u}`-`{v}` differs across the base"
                )));
            }
        }
        for p in &base.p_part {
            if a.rho(p, u)? != b.rho(p, u)? {
                return Err(ConstructError::BaseMismatch(format!(
                    "rho({p}, {u}) differs across the base"
                )));
            }
        }
    }
    let closed = check_closed(base, b).map_err(ConstructError::Core)?;
    if !closed.is_empty() {
        return Err(ConstructError::NotClosed {
            part: "base inside the attached structure".to_owned(),
            report: closed,
        });
    }

    let new_vertices: Vec<VertexId> = b
        .forest()
        .vertices()
        .filter(|v| !base.o_part.contains(*v))
        .cloned()
        .collect();
    for v in &new_vertices {
        if a.forest().contains(v) {
            return Err(ConstructError::IdCollision(v.as_str().to_owned()));
        }
    }

    // Rows of params outside the base extend from their base restriction
    // over the attached forest; closedness of the base makes that sound.
    let mut extended: BTreeMap<ParamId, C4Coloring> = BTreeMap::new();
    for p in a.params().clone() {
        if base.p_part.contains(&p) {
            continue;
        }
        let restriction = C4Coloring::from_row(a, &p, &base.o_part)?;
        let row = extend_coloring(b.forest(), &base.o_part, &restriction, a.variant())?;
        extended.insert(p, row);
    }

    for v in &new_vertices {
        let mut column: BTreeMap<ParamId, Color> = BTreeMap::new();
        for p in a.params() {
            let c = if base.p_part.contains(p) {
                b.rho(p, v)?
            } else {
                extended[p].get(v).expect("extension is total")
            };
            column.insert(p.clone(), c);
        }
        a.push_vertex(v.clone(), &column)?;
    }
    for (u, v, c) in b.forest().edges() {
        if base.o_part.contains(u) && base.o_part.contains(v) {
            continue;
        }
        a.forest_mut().insert_edge_unchecked(c, u, v);
    }
    // Closedness of the base rules out cycles; re-check to be sure.
    a.forest().validate()?;
    Ok(())
}

/// Introduce one fresh param inducing each target coloring exactly: the
/// targets interpolate into one valid coloring, which then extends over the
/// whole forest. Returns the new structure and the param's identifier.
pub fn introduce_parameter(
    s: &Structure,
    targets: &[(BTreeSet<VertexId>, C4Coloring)],
) -> Result<(Structure, ParamId), ConstructError> {
    require_copacetic(s, "input structure")?;
    let mut out = s.clone();
    let mut ids = FreshIds::new("p");
    let p = introduce_parameter_inplace(&mut out, targets, &mut ids)?;
    debug_assert!(verify_copacetic(&out).is_empty());
    Ok((out, p))
}

fn introduce_parameter_inplace(
    s: &mut Structure,
    targets: &[(BTreeSet<VertexId>, C4Coloring)],
    ids: &mut FreshIds,
) -> Result<ParamId, ConstructError> {
    let (merged_set, merged_col) = interpolate_colorings(s.forest(), targets, s.variant())?;
    let row = extend_coloring(s.forest(), &merged_set, &merged_col, s.variant())?;
    let p = ids.next_param(s);
    let row_map: BTreeMap<VertexId, Color> = row.iter().map(|(v, c)| (v.clone(), c)).collect();
    s.push_param(p.clone(), row_map)?;
    Ok(p)
}

// ---------------------------------------------------------------------------
// Forge
// ---------------------------------------------------------------------------

/// Forge scheduling knobs. The defaults favor completion work, which the
/// downstream independence checks need most.
#[derive(Clone, Debug)]
pub struct ForgeConfig {
    /// Share of steps doing completion work.
    pub completion_share: f64,
    /// Share of steps doing tree extension (on top of completion share).
    pub tree_share: f64,
    /// Deficit fixes attempted per completion step.
    pub completion_fixes: usize,
    /// Max fresh vertices per tree extension.
    pub tree_max_vertices: usize,
    /// Max targets per parameter introduction.
    pub param_max_targets: usize,
}

impl Default for ForgeConfig {
    fn default() -> ForgeConfig {
        ForgeConfig {
            completion_share: 0.7,
            tree_share: 0.2,
            completion_fixes: 8,
            tree_max_vertices: 6,
            param_max_targets: 2,
        }
    }
}

/// Run `steps` randomized construction steps from `seed`, deterministic in
/// `rng_seed`: completion work, small tree extensions via free amalgams,
/// and parameter introductions. The result is copacetic at every step.
pub fn forge(s: &Structure, steps: usize, rng_seed: u64) -> Result<Structure, ConstructError> {
    forge_inspect(s, steps, rng_seed, &ForgeConfig::default(), |_, _| {})
}

/// Like [`forge`], with a callback after every step for checkpointing.
pub fn forge_inspect(
    s: &Structure,
    steps: usize,
    rng_seed: u64,
    config: &ForgeConfig,
    mut inspect: impl FnMut(usize, &Structure),
) -> Result<Structure, ConstructError> {
    require_copacetic(s, "forge seed")?;
    let mut out = s.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut vertex_ids = FreshIds::new("w");
    let mut tree_ids = FreshIds::new("t");
    let mut param_ids = FreshIds::new("p");
    for step in 1..=steps {
        let roll: f64 = rng.gen();
        if roll < config.completion_share {
            forge_completion_step(&mut out, &mut rng, &mut vertex_ids, config.completion_fixes)?;
        } else if roll < config.completion_share + config.tree_share {
            forge_tree_step(&mut out, &mut rng, &mut tree_ids, config.tree_max_vertices)?;
        } else {
            forge_param_step(&mut out, &mut rng, &mut param_ids, config.param_max_targets)?;
        }
        inspect(step, &out);
    }
    Ok(out)
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> Option<&'a T> {
    if items.is_empty() {
        None
    } else {
        items.get(rng.gen_range(0..items.len()))
    }
}

fn forge_completion_step(
    s: &mut Structure,
    rng: &mut ChaCha8Rng,
    ids: &mut FreshIds,
    fixes: usize,
) -> Result<(), ConstructError> {
    let vertices: Vec<VertexId> = s.forest().vertices().cloned().collect();
    let params: Vec<ParamId> = s.params().iter().cloned().collect();
    if vertices.is_empty() || params.is_empty() {
        return Ok(());
    }
    let colors: Vec<Color> = s.variant().colors().collect();
    for _ in 0..fixes {
        let p = pick(rng, &params).unwrap().clone();
        let v = pick(rng, &vertices).unwrap().clone();
        let assigned = s.rho(&p, &v)?;
        for &color in &colors {
            if color == assigned {
                continue;
            }
            let need = s.variant().capacity(color)?;
            while closure_images(s, &p, &v, color)?.len() < need {
                add_closure_image_inplace(s, &p, &v, color, ids)?;
            }
        }
    }
    Ok(())
}

fn forge_tree_step(
    s: &mut Structure,
    rng: &mut ChaCha8Rng,
    ids: &mut FreshIds,
    max_vertices: usize,
) -> Result<(), ConstructError> {
    let n_new = rng.gen_range(1..=max_vertices);
    let vertices: Vec<VertexId> = s.forest().vertices().cloned().collect();
    let attach = if !vertices.is_empty() && rng.gen_bool(0.5) {
        Some(pick(rng, &vertices).unwrap().clone())
    } else {
        None
    };
    // Base: a single vertex (path-closed, no params) or empty.
    let base = match &attach {
        Some(v) => SubsetHandle::vertices([v.clone()]),
        None => SubsetHandle::empty(),
    };
    // The attached structure: the base plus a fresh random tree.
    let mut side = Structure::empty(s.variant().clone());
    if let Some(v) = &attach {
        side.forest_mut().add_vertex(v.clone())?;
    }
    let mut side_vertices: Vec<VertexId> = attach.iter().cloned().collect();
    let mut taken: BTreeSet<VertexId> = BTreeSet::new();
    let k = s.variant().color_count();
    for i in 0..n_new {
        let fresh = ids.next_vertex_avoiding(s, &taken);
        taken.insert(fresh.clone());
        side.forest_mut().add_vertex(fresh.clone())?;
        let color = Color::new(rng.gen_range(1..=k)).unwrap();
        if i == 0 {
            if let Some(v) = &attach {
                side.forest_mut().insert_edge_unchecked(color, v, &fresh);
            }
        } else if let Some(parent) = pick(rng, &side_vertices) {
            let parent = parent.clone();
            side.forest_mut().insert_edge_unchecked(color, &parent, &fresh);
        }
        side_vertices.push(fresh);
    }
    free_amalgam_inplace(s, &base, &side)
}

fn forge_param_step(
    s: &mut Structure,
    rng: &mut ChaCha8Rng,
    ids: &mut FreshIds,
    max_targets: usize,
) -> Result<(), ConstructError> {
    let vertices: Vec<VertexId> = s.forest().vertices().cloned().collect();
    let mut want = rng.gen_range(0..=max_targets.min(vertices.len()));
    let k = s.variant().color_count();
    loop {
        // Star-shaped targets: a vertex plus some neighbors, colored by a
        // random admissible choice (members differ from their attaching
        // edge's color), which is always valid.
        let mut targets: Vec<(BTreeSet<VertexId>, C4Coloring)> = Vec::new();
        let mut used: BTreeSet<VertexId> = BTreeSet::new();
        for _ in 0..want {
            let Some(center) = pick(rng, &vertices) else { break };
            if used.contains(center) {
                continue;
            }
            let mut set: BTreeSet<VertexId> = [center.clone()].into();
            let neighbors: Vec<VertexId> =
                s.forest().neighbors(center)?.keys().cloned().collect();
            for _ in 0..2 {
                if let Some(n) = pick(rng, &neighbors) {
                    set.insert(n.clone());
                }
            }
            let mut col = C4Coloring::new();
            col.set(center.clone(), Color::new(rng.gen_range(1..=k)).unwrap());
            for v in &set {
                if v == center {
                    continue;
                }
                let edge = s.forest().edge_color(center, v)?.unwrap();
                let mut c = Color::new(rng.gen_range(1..=k)).unwrap();
                while c == edge {
                    c = Color::new(rng.gen_range(1..=k)).unwrap();
                }
                col.set(v.clone(), c);
            }
            used.extend(set.iter().cloned());
            targets.push((set, col));
        }
        // Distance gate; drop a target and retry when too close.
        let threshold = 2u64.pow(targets.len() as u32);
        let mut ok = true;
        'pairs: for i in 0..targets.len() {
            for j in i + 1..targets.len() {
                if !s
                    .forest()
                    .distance_between_sets(&targets[i].0, &targets[j].0)?
                    .exceeds(threshold)
                {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if ok {
            introduce_parameter_inplace(s, &targets, ids)?;
            return Ok(());
        }
        want = want.saturating_sub(1);
    }
}

// ---------------------------------------------------------------------------
// Triple amalgam
// ---------------------------------------------------------------------------

/// A copacetic structure containing the base, with two distinguished closed
/// parts (each containing the base).
#[derive(Clone, Debug)]
pub struct PairData {
    pub structure: Structure,
    pub left: SubsetHandle,
    pub right: SubsetHandle,
}

/// Per-claim outcome of the three-way amalgam.
#[derive(Clone, Debug)]
pub struct TripleAmalgamReport {
    /// Copaceticity of the completed amalgam.
    pub copacetic: ViolationReport,
    /// qf-type preservation of the three starred pairs against their
    /// sources, via the copy maps.
    pub type_ab: Result<(), String>,
    pub type_ac: Result<(), String>,
    pub type_bc: Result<(), String>,
    /// First base-avoiding path between the a-side and the b/c-sides, if
    /// one exists.
    pub cross_path: Option<(VertexId, VertexId)>,
    /// Closedness of the three starred pairs (recomputed as closures in the
    /// completed amalgam; budgeted completion grows them only by their own
    /// pendant images).
    pub star_ab_closed: ViolationReport,
    pub star_ac_closed: ViolationReport,
    pub star_bc_closed: ViolationReport,
    /// The a-side is independent from the combined b/c-side over the base.
    pub final_independent: bool,
    pub final_witness: Option<DependenceWitness>,
}

impl TripleAmalgamReport {
    pub fn all_green(&self) -> bool {
        self.copacetic.is_empty()
            && self.type_ab.is_ok()
            && self.type_ac.is_ok()
            && self.type_bc.is_ok()
            && self.cross_path.is_none()
            && self.star_ab_closed.is_empty()
            && self.star_ac_closed.is_empty()
            && self.star_bc_closed.is_empty()
            && self.final_independent
    }

    pub fn summary(&self) -> String {
        let flag = |ok: bool| if ok { "ok" } else { "FAIL" };
        format!(
            "copacetic={} type-ab={} type-ac={} type-bc={} no-cross-path={} closed-ab={} closed-ac={} closed-bc={} independent={}",
            flag(self.copacetic.is_empty()),
            flag(self.type_ab.is_ok()),
            flag(self.type_ac.is_ok()),
            flag(self.type_bc.is_ok()),
            flag(self.cross_path.is_none()),
            flag(self.star_ab_closed.is_empty()),
            flag(self.star_ac_closed.is_empty()),
            flag(self.star_bc_closed.is_empty()),
            flag(self.final_independent),
        )
    }
}

#[derive(Clone, Debug)]
pub struct TripleAmalgamOutput {
    pub structure: Structure,
    pub a_embedding: Embedding,
    pub b_embedding: Embedding,
    pub c_embedding: Embedding,
    pub report: TripleAmalgamReport,
}

fn hyp(step: &'static str, detail: impl Into<String>) -> ConstructError {
    ConstructError::Hypothesis {
        step,
        detail: detail.into(),
    }
}

/// The two starred closures of one pair, scheduled for re-instantiation in
/// the amalgam under one shared copy map. Vertices already realized in the
/// amalgam (the pair's parts, under the pair's identification) are reused;
/// only vertices outside both parts get fresh copies.
struct PairStars {
    left_star: SubsetHandle,
    right_star: SubsetHandle,
    /// Source identifier -> amalgam identifier for the parts.
    part_map: BTreeMap<VertexId, VertexId>,
    /// Source param -> amalgam param for the closure params.
    param_map: BTreeMap<ParamId, ParamId>,
}

/// Build the three-way amalgam: the three parts freely amalgamated over the
/// base, the six starred closure sets re-instantiated with fresh vertices,
/// rows completed by coloring extension, and a budgeted completion pass.
/// The report re-checks every claimed property of the result.
pub fn triple_amalgam(
    m: &Structure,
    ab: &PairData,
    ac: &PairData,
    bc: &PairData,
    iso: &Embedding,
    depth: usize,
) -> Result<TripleAmalgamOutput, ConstructError> {
    let variant = m.variant().clone();
    for (name, pd) in [("ab", ab), ("ac", ac), ("bc", bc)] {
        if pd.structure.variant() != &variant {
            return Err(hyp("variant", format!("pair {name} differs in variant")));
        }
        require_copacetic(&pd.structure, name)?;
    }
    require_copacetic(m, "base")?;

    let m_handle = m.full_handle();
    for (name, pd) in [("ab", ab), ("ac", ac), ("bc", bc)] {
        m_handle
            .validate(&pd.structure)
            .map_err(|e| hyp("base-containment", format!("pair {name}: {e}")))?;
        if !pd.structure.induced(&m_handle).map_err(ConstructError::Core)?.same_content(m) {
            return Err(hyp(
                "base-containment",
                format!("pair {name} disagrees with the base structure"),
            ));
        }
        let closed = check_closed(&m_handle, &pd.structure)?;
        if !closed.is_empty() {
            return Err(hyp(
                "base-closed",
                format!("pair {name}:\n{closed}"),
            ));
        }
        for (side, handle) in [("left", &pd.left), ("right", &pd.right)] {
            handle
                .validate(&pd.structure)
                .map_err(|e| hyp("parts", format!("pair {name} {side}: {e}")))?;
            if !m_handle.is_subset_of(handle) {
                return Err(hyp(
                    "parts",
                    format!("pair {name} {side} does not contain the base"),
                ));
            }
            let closed = check_closed(handle, &pd.structure)?;
            if !closed.is_empty() {
                return Err(hyp(
                    "parts-closed",
                    format!("pair {name} {side}:\n{closed}"),
                ));
            }
        }
        let inter_o: BTreeSet<_> = pd.left.o_part.intersection(&pd.right.o_part).collect();
        let inter_p: BTreeSet<_> = pd.left.p_part.intersection(&pd.right.p_part).collect();
        if inter_o != m_handle.o_part.iter().collect()
            || inter_p != m_handle.p_part.iter().collect()
        {
            return Err(hyp(
                "parts",
                format!("pair {name}: parts overlap beyond the base"),
            ));
        }
        let (indep, witness) = independent(&pd.structure, &m_handle, &pd.left, &pd.right, 0)?;
        if !indep {
            return Err(hyp(
                "independence",
                format!("pair {name}: {}", witness.unwrap()),
            ));
        }
    }

    // Identifications: the b-part of ab and bc, the c-part of ac and bc.
    if ab.right != bc.left {
        return Err(hyp("identification", "b-part of ab and bc differ"));
    }
    if ac.right != bc.right {
        return Err(hyp("identification", "c-part of ac and bc differ"));
    }
    let b_view_ab = ab.structure.induced(&ab.right).map_err(ConstructError::Core)?;
    let b_view_bc = bc.structure.induced(&bc.left).map_err(ConstructError::Core)?;
    if !b_view_ab.same_content(&b_view_bc) {
        return Err(hyp("identification", "b-part structures disagree"));
    }
    let c_view_ac = ac.structure.induced(&ac.right).map_err(ConstructError::Core)?;
    let c_view_bc = bc.structure.induced(&bc.right).map_err(ConstructError::Core)?;
    if !c_view_ac.same_content(&c_view_bc) {
        return Err(hyp("identification", "c-part structures disagree"));
    }

    // The isomorphism witnessing that the a-parts share their type over the
    // base: identity on the base, a-part of ab onto the a-part of ac.
    if iso.domain() != ab.left || iso.image() != ac.left {
        return Err(hyp("iso", "domain/image do not match the a-parts"));
    }
    for v in &m_handle.o_part {
        if iso.vertex_map.get(v) != Some(v) {
            return Err(hyp("iso", format!("not the identity on base vertex {v}")));
        }
    }
    for p in &m_handle.p_part {
        if iso.param_map.get(p) != Some(p) {
            return Err(hyp("iso", format!("not the identity on base param {p}")));
        }
    }
    iso.verify(&ab.structure, &ac.structure)
        .map_err(|e| hyp("iso", e.to_string()))?;
    let iso_inv = iso.inverse().map_err(|e| hyp("iso", e.to_string()))?;

    let a_h = &ab.left;
    let b_h = &ab.right;
    let c_h = &bc.right;
    // Disjointness outside the base across the two source structures.
    for v in a_h.o_part.difference(&m_handle.o_part) {
        if c_h.o_part.contains(v) {
            return Err(ConstructError::IdCollision(v.as_str().to_owned()));
        }
    }
    for p in a_h.p_part.difference(&m_handle.p_part) {
        if c_h.p_part.contains(p) {
            return Err(ConstructError::IdCollision(p.as_str().to_owned()));
        }
    }

    // --- A0: the three parts freely amalgamated over the base. -----------
    let all_o: BTreeSet<VertexId> = a_h
        .o_part
        .iter()
        .chain(&b_h.o_part)
        .chain(&c_h.o_part)
        .cloned()
        .collect();
    let all_p: BTreeSet<ParamId> = a_h
        .p_part
        .iter()
        .chain(&b_h.p_part)
        .chain(&c_h.p_part)
        .cloned()
        .collect();

    let mut forest = Forest::new(variant.color_count());
    for v in &all_o {
        forest.add_vertex(v.clone())?;
    }
    let mut edge_set: BTreeSet<(VertexId, VertexId, Color)> = BTreeSet::new();
    let ab_union = a_h.union(b_h);
    for (u, v, c) in ab.structure.induced(&ab_union)?.forest().edges() {
        edge_set.insert((u.clone(), v.clone(), c));
    }
    let bc_union = b_h.union(c_h);
    for (u, v, c) in bc.structure.induced(&bc_union)?.forest().edges() {
        edge_set.insert((u.clone(), v.clone(), c));
    }
    for (u, v, c) in &edge_set {
        forest.insert_edge_unchecked(*c, u, v);
    }
    forest
        .validate()
        .map_err(|e| hyp("amalgam-forest", e.to_string()))?;

    // rho on the amalgam, sourced per param class and vertex class.
    let rho_at = |p: &ParamId, v: &VertexId| -> Result<Color, ConstructError> {
        let in_a = a_h.o_part.contains(v);
        let in_b = b_h.o_part.contains(v);
        let in_c = c_h.o_part.contains(v);
        let p_in_m = m_handle.p_part.contains(p);
        let p_in_a = a_h.p_part.contains(p);
        let p_in_b = b_h.p_part.contains(p);
        let c_res = if p_in_m || p_in_b {
            if in_a || in_b {
                ab.structure.rho(p, v)
            } else {
                debug_assert!(in_c);
                bc.structure.rho(p, v)
            }
        } else if p_in_a {
            if in_a || in_b {
                ab.structure.rho(p, v)
            } else {
                ac.structure.rho(iso.map_param(p)?, v)
            }
        } else {
            // c-only param.
            if in_b || in_c {
                bc.structure.rho(p, v)
            } else {
                ac.structure.rho(p, iso.map_vertex(v)?)
            }
        };
        c_res.map_err(ConstructError::Core)
    };

    let mut a0 = Structure::empty(variant.clone());
    *a0.forest_mut() = forest;
    for p in &all_p {
        let mut row: BTreeMap<VertexId, Color> = BTreeMap::new();
        for v in &all_o {
            row.insert(v.clone(), rho_at(p, v)?);
        }
        a0.push_param(p.clone(), row)?;
    }
    let a0_report = verify_copacetic(&a0);
    if !a0_report.is_empty() {
        return Err(hyp("amalgam-copacetic", a0_report.to_string()));
    }

    // --- A1: re-instantiate the six starred closures. ---------------------
    let p0_ab: BTreeSet<ParamId> = a_h.p_part.union(&b_h.p_part).cloned().collect();
    let p0_ac: BTreeSet<ParamId> = ac.left.p_part.union(&ac.right.p_part).cloned().collect();
    let p0_bc: BTreeSet<ParamId> = b_h.p_part.union(&c_h.p_part).cloned().collect();

    let identity_params = |params: &BTreeSet<ParamId>| -> BTreeMap<ParamId, ParamId> {
        params.iter().map(|p| (p.clone(), p.clone())).collect()
    };
    let identity_vertices = |vs: &BTreeSet<VertexId>| -> BTreeMap<VertexId, VertexId> {
        vs.iter().map(|v| (v.clone(), v.clone())).collect()
    };
    // The ac pair maps into the amalgam through the inverse isomorphism on
    // its a-part; the other pairs embed by identity.
    let mut ac_part_map = identity_vertices(&ac.right.o_part);
    for v in &ac.left.o_part {
        ac_part_map.insert(v.clone(), iso_inv.map_vertex(v)?.clone());
    }
    let mut ac_param_map = identity_params(&ac.right.p_part);
    for p in &ac.left.p_part {
        ac_param_map.insert(p.clone(), iso_inv.map_param(p)?.clone());
    }
    let pair_stars = [
        PairStars {
            left_star: closure_of(&ab.structure, a_h, Some(&p0_ab))?,
            right_star: closure_of(&ab.structure, b_h, Some(&p0_ab))?,
            part_map: identity_vertices(&ab_union.o_part),
            param_map: identity_params(&p0_ab),
        },
        PairStars {
            left_star: closure_of(&ac.structure, &ac.left, Some(&p0_ac))?,
            right_star: closure_of(&ac.structure, &ac.right, Some(&p0_ac))?,
            part_map: ac_part_map,
            param_map: ac_param_map,
        },
        PairStars {
            left_star: closure_of(&bc.structure, &bc.left, Some(&p0_bc))?,
            right_star: closure_of(&bc.structure, &bc.right, Some(&p0_bc))?,
            part_map: identity_vertices(&bc_union.o_part),
            param_map: identity_params(&p0_bc),
        },
    ];
    let sources = [&ab.structure, &ac.structure, &bc.structure];

    let mut fresh = FreshIds::new("s");
    let mut new_forest = a0.forest().clone();
    let mut taken: BTreeSet<VertexId> = BTreeSet::new();
    // Per amalgam param: additional assignments on copied vertices.
    let mut partial_extra: BTreeMap<ParamId, Vec<(VertexId, Color)>> = BTreeMap::new();
    // Per pair: the full copy map over the star union, and the two stars'
    // vertex sets in amalgam identifiers.
    let mut pair_maps: Vec<BTreeMap<VertexId, VertexId>> = Vec::new();
    let mut star_amalgam_o: Vec<(BTreeSet<VertexId>, BTreeSet<VertexId>)> = Vec::new();

    for (ps, src) in pair_stars.iter().zip(sources) {
        let union_o: BTreeSet<&VertexId> = ps
            .left_star
            .o_part
            .union(&ps.right_star.o_part)
            .collect();
        // Shared copy map: parts by identification, everything genuinely
        // new by one fresh vertex per source vertex.
        let mut map = ps.part_map.clone();
        let mut new_vertices: Vec<&VertexId> = Vec::new();
        for v in &union_o {
            if !map.contains_key(*v) {
                let id = fresh.next_vertex_avoiding(&a0, &taken);
                taken.insert(id.clone());
                new_forest.add_vertex(id.clone())?;
                map.insert((*v).clone(), id);
                new_vertices.push(v);
            }
        }
        for (u, v, c) in src.forest().edges() {
            let in_union = union_o.contains(u) && union_o.contains(v);
            let touches_new = !ps.part_map.contains_key(u) || !ps.part_map.contains_key(v);
            if in_union && touches_new {
                new_forest.insert_edge_unchecked(c, &map[u], &map[v]);
            }
        }
        for (p, amalgam_p) in &ps.param_map {
            let entry = partial_extra.entry(amalgam_p.clone()).or_default();
            for v in &new_vertices {
                entry.push((map[*v].clone(), src.rho(p, v)?));
            }
        }
        star_amalgam_o.push((
            ps.left_star.o_part.iter().map(|v| map[v].clone()).collect(),
            ps.right_star.o_part.iter().map(|v| map[v].clone()).collect(),
        ));
        pair_maps.push(map);
    }
    new_forest
        .validate()
        .map_err(|e| hyp("star-forest", e.to_string()))?;

    // Per-param partial rows over the grown forest, checked and extended.
    let mut a1 = Structure::empty(variant.clone());
    *a1.forest_mut() = new_forest;
    let f1 = a1.forest().clone();
    for p in &all_p {
        let mut partial: C4Coloring = a0.rho_row(p)?.clone().into_iter().collect();
        if let Some(extra) = partial_extra.get(p) {
            for (v, c) in extra {
                if let Some(prev) = partial.get(v) {
                    if prev != *c {
                        return Err(hyp(
                            "star-rho",
                            format!("conflicting copies for param {p} at {v}"),
                        ));
                    }
                }
                partial.set(v.clone(), *c);
            }
        }
        let report = check_c4_coloring(&f1, &partial, &variant)?;
        if !report.is_empty() {
            return Err(hyp(
                "star-rho",
                format!("partial row of {p} violates capacities:\n{report}"),
            ));
        }
        let row = if partial.len() == f1.vertex_count() {
            partial
        } else {
            extend_coloring(&f1, &partial.domain(), &partial, &variant)
                .map_err(|e| hyp("row-extension", format!("param {p}: {e}")))?
        };
        a1.push_param(p.clone(), row.iter().map(|(v, c)| (v.clone(), c)).collect())?;
    }
    let a1_report = verify_copacetic(&a1);
    if !a1_report.is_empty() {
        return Err(hyp("grown-copacetic", a1_report.to_string()));
    }

    // --- A2: budgeted completion (pendant-only, preserves the claims). ----
    let a2 = complete_budgeted(&a1, depth)?;

    // --- Report. -----------------------------------------------------------
    // Type preservation: the pair's copy map, restricted to the star union,
    // is a partial isomorphism from the source into the completed amalgam.
    let type_check = |pair: usize, src: &Structure| -> Result<(), String> {
        let union_o: BTreeSet<VertexId> = pair_stars[pair]
            .left_star
            .o_part
            .union(&pair_stars[pair].right_star.o_part)
            .cloned()
            .collect();
        let vertex_map: BTreeMap<VertexId, VertexId> = union_o
            .iter()
            .map(|v| (v.clone(), pair_maps[pair][v].clone()))
            .collect();
        Embedding {
            vertex_map,
            param_map: pair_stars[pair].param_map.clone(),
        }
        .verify(src, &a2)
        .map_err(|e| e.to_string())
    };
    let type_ab = type_check(0, &ab.structure);
    let type_ac = type_check(1, &ac.structure);
    let type_bc = type_check(2, &bc.structure);

    // (6): no base-avoiding path between the a-side and the b/c-sides.
    let mut cross_path = None;
    {
        let mut labels: BTreeMap<&VertexId, usize> = BTreeMap::new();
        let mut next = 0usize;
        for start in a2.forest().vertices() {
            if m_handle.o_part.contains(start) || labels.contains_key(start) {
                continue;
            }
            let mut stack = vec![start];
            labels.insert(start, next);
            while let Some(x) = stack.pop() {
                for y in a2.forest().neighbors(x).unwrap().keys() {
                    if !m_handle.o_part.contains(y) && !labels.contains_key(y) {
                        labels.insert(y, next);
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        'outer: for u in a_h.o_part.difference(&m_handle.o_part) {
            for w in b_h.o_part.union(&c_h.o_part) {
                if m_handle.o_part.contains(w) {
                    continue;
                }
                if labels.get(u).is_some() && labels.get(u) == labels.get(w) {
                    cross_path = Some((u.clone(), w.clone()));
                    break 'outer;
                }
            }
        }
    }

    // (7): the three starred pairs, recomputed as closures in the completed
    // amalgam, pass the closedness check.
    let star_pair_closed = |pair: usize| -> Result<ViolationReport, ConstructError> {
        let params: BTreeSet<ParamId> = pair_stars[pair].param_map.values().cloned().collect();
        let (left_o, right_o) = &star_amalgam_o[pair];
        let seed = SubsetHandle {
            o_part: left_o.union(right_o).cloned().collect(),
            p_part: params.clone(),
        };
        let grown = closure_of(&a2, &seed, Some(&params))?;
        Ok(check_closed(&grown, &a2)?)
    };
    let star_ab_closed = star_pair_closed(0)?;
    let star_ac_closed = star_pair_closed(1)?;
    let star_bc_closed = star_pair_closed(2)?;

    let bc_combined = b_h.union(c_h);
    let (final_independent, final_witness) = independent(&a2, &m_handle, a_h, &bc_combined, 0)?;

    let report = TripleAmalgamReport {
        copacetic: verify_copacetic(&a2),
        type_ab,
        type_ac,
        type_bc,
        cross_path,
        star_ab_closed,
        star_ac_closed,
        star_bc_closed,
        final_independent,
        final_witness,
    };

    Ok(TripleAmalgamOutput {
        structure: a2,
        a_embedding: Embedding::identity(a_h),
        b_embedding: Embedding::identity(b_h),
        c_embedding: Embedding::identity(c_h),
        report,
    })
}
