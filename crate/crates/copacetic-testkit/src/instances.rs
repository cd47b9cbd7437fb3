//! Seeded builders for structured fuzz instances: random handles, pairs
//! satisfying the two-sided closure hypotheses, three-way amalgam inputs,
//! and spider forests for interpolation tests.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use copacetic::axioms::check_closed;
use copacetic::closure::closure_of;
use copacetic::construct::{complete_budgeted, free_amalgam, introduce_parameter, PairData};
use copacetic::generate::{random_instance, GenProfile};
use copacetic::independence::independent;
use copacetic::structure::{StructureBuilder, SubsetHandle};
use copacetic::variant::{Color, TheoryVariant};
use copacetic::{C4Coloring, Embedding, Forest, ParamId, Structure, VertexId};

/// A random subset handle over a structure's identifiers.
pub fn random_handle(rng: &mut ChaCha8Rng, s: &Structure, density: f64) -> SubsetHandle {
    let o_part = s
        .forest()
        .vertices()
        .filter(|_| rng.gen_bool(density))
        .cloned()
        .collect();
    let p_part = s
        .params()
        .iter()
        .filter(|_| rng.gen_bool(density))
        .cloned()
        .collect();
    SubsetHandle { o_part, p_part }
}

/// A random connected subtree (possibly empty): path-closed by construction.
pub fn random_subtree(rng: &mut ChaCha8Rng, f: &Forest, max_size: usize) -> BTreeSet<VertexId> {
    let vertices: Vec<&VertexId> = f.vertices().collect();
    if vertices.is_empty() || max_size == 0 {
        return BTreeSet::new();
    }
    let start = vertices[rng.gen_range(0..vertices.len())].clone();
    let mut set: BTreeSet<VertexId> = [start].into();
    let want = rng.gen_range(1..=max_size);
    while set.len() < want {
        let frontier: Vec<VertexId> = set
            .iter()
            .flat_map(|v| f.neighbors(v).unwrap().keys().cloned())
            .filter(|w| !set.contains(w))
            .collect();
        if frontier.is_empty() {
            break;
        }
        set.insert(frontier[rng.gen_range(0..frontier.len())].clone());
    }
    set
}

/// Recipe for a small side tree: for each fresh vertex, the index of its
/// parent among (attachment, previous fresh vertices) and the edge color.
#[derive(Clone, Debug)]
struct SideRecipe {
    edges: Vec<(Option<usize>, u8)>,
}

fn side_recipe(rng: &mut ChaCha8Rng, n: usize, attached: bool, k: u8) -> SideRecipe {
    let edges = (0..n)
        .map(|i| {
            let color = rng.gen_range(1..=k);
            let parent = if i == 0 {
                if attached {
                    Some(0)
                } else {
                    None
                }
            } else {
                // 0 = attachment (when present), 1.. = earlier fresh vertex.
                let hi = if attached { i + 1 } else { i };
                let pick = rng.gen_range(0..hi);
                if attached && pick == 0 {
                    Some(0)
                } else {
                    Some(if attached { pick } else { pick + 1 })
                }
            };
            (parent, color)
        })
        .collect();
    SideRecipe { edges }
}

/// Attach a side tree built from a recipe; returns the grown structure and
/// the fresh vertex ids in recipe order.
fn attach_side(
    s: &Structure,
    recipe: &SideRecipe,
    prefix: &str,
    attach: Option<&VertexId>,
) -> (Structure, Vec<VertexId>) {
    let mut b = StructureBuilder::new(s.variant().clone());
    if let Some(v) = attach {
        b = b.vertex(v.as_str()).unwrap();
    }
    let names: Vec<VertexId> = (0..recipe.edges.len())
        .map(|i| VertexId::new(format!("{prefix}{i}")))
        .collect();
    for (i, (parent, color)) in recipe.edges.iter().enumerate() {
        b = b.vertex(names[i].as_str()).unwrap();
        let parent_id = match parent {
            None => None,
            Some(0) if attach.is_some() => Some(attach.unwrap().clone()),
            Some(j) => {
                let j = if attach.is_some() { *j - 1 } else { *j - 1 };
                Some(names[j].clone())
            }
        };
        if let Some(p) = parent_id {
            b = b.edge(*color, p.as_str(), names[i].as_str()).unwrap();
        }
    }
    let side = b.build().expect("side trees are copacetic");
    let base = match attach {
        Some(v) => SubsetHandle::vertices([v.clone()]),
        None => SubsetHandle::empty(),
    };
    let (out, _, _) = free_amalgam(s, &base, &side).expect("side attachment is a free amalgam");
    (out, names)
}

/// Introduce one param targeting a singleton inside the given side, by a
/// recipe (vertex index, color) so it can be mirrored.
fn side_param(
    s: &Structure,
    side: &[VertexId],
    target_index: usize,
    color: u8,
) -> (Structure, ParamId) {
    let v = side[target_index % side.len()].clone();
    let col: C4Coloring = [(v.clone(), Color::new(color).unwrap())].into_iter().collect();
    let target = ([v].into(), col);
    introduce_parameter(s, &[target]).expect("singleton targets are valid")
}

/// Inputs for the two-sided closure computation, built to satisfy its
/// hypotheses: an all-param-closed base and two sides with their own params
/// meeting only in the base.
pub struct LemmaPair {
    pub structure: Structure,
    pub base: SubsetHandle,
    pub left: SubsetHandle,
    pub right: SubsetHandle,
}

pub fn lemma_pair_instance(rng: &mut ChaCha8Rng, variant: &TheoryVariant) -> LemmaPair {
    let k = variant.color_count();
    let core_n = rng.gen_range(2..=4);
    let core_params = rng.gen_range(0..=1);
    let mut s = random_instance(rng, &GenProfile::new(variant.clone(), core_n, core_params));
    let core_vertices = s.forest().vertex_set();
    let core_params: BTreeSet<ParamId> = s.params().clone();

    let mut sides: Vec<Vec<VertexId>> = Vec::new();
    let mut side_params: Vec<BTreeSet<ParamId>> = Vec::new();
    for prefix in ["a", "b"] {
        let attached = rng.gen_bool(0.7);
        let attach = if attached {
            let vs: Vec<&VertexId> = core_vertices.iter().collect();
            Some(vs[rng.gen_range(0..vs.len())].clone())
        } else {
            None
        };
        let n = rng.gen_range(2..=3);
        let recipe = side_recipe(rng, n, attach.is_some(), k);
        let (grown, names) = attach_side(&s, &recipe, prefix, attach.as_ref());
        s = grown;
        let mut params = BTreeSet::new();
        for _ in 0..rng.gen_range(0..=1) {
            let (grown, p) = side_param(&s, &names, rng.gen_range(0..names.len()), rng.gen_range(1..=k));
            s = grown;
            params.insert(p);
        }
        sides.push(names);
        side_params.push(params);
    }
    if rng.gen_bool(0.5) {
        s = complete_budgeted(&s, 1).expect("completion succeeds");
    }

    let all_params = s.params().clone();
    let base_o = closure_of(
        &s,
        &SubsetHandle {
            o_part: core_vertices,
            p_part: core_params.clone(),
        },
        Some(&all_params),
    )
    .expect("base closure")
    .o_part;
    let base = SubsetHandle {
        o_part: base_o,
        p_part: core_params.clone(),
    };
    let mut handles = Vec::new();
    for (names, params) in sides.iter().zip(&side_params) {
        let seed = SubsetHandle {
            o_part: base.o_part.iter().cloned().chain(names.iter().cloned()).collect(),
            p_part: base.p_part.iter().cloned().chain(params.iter().cloned()).collect(),
        };
        handles.push(closure_of(&s, &seed, None).expect("side closure"));
    }
    let right = handles.pop().unwrap();
    let left = handles.pop().unwrap();

    debug_assert!(check_closed(&base, &s).unwrap().is_empty());
    debug_assert!(check_closed(&left, &s).unwrap().is_empty());
    debug_assert!(check_closed(&right, &s).unwrap().is_empty());
    LemmaPair {
        structure: s,
        base,
        left,
        right,
    }
}

/// Backtracking search for a qf-isomorphism between two handles with all
/// params pinned, used to recover the mirror map between identically-built
/// sides.
pub fn find_iso(
    s: &Structure,
    pinned_vertices: &BTreeMap<VertexId, VertexId>,
    param_map: &BTreeMap<ParamId, ParamId>,
    from: &SubsetHandle,
    to: &SubsetHandle,
) -> Option<Embedding> {
    if from.o_part.len() != to.o_part.len() {
        return None;
    }
    let free: Vec<VertexId> = from
        .o_part
        .iter()
        .filter(|v| !pinned_vertices.contains_key(*v))
        .cloned()
        .collect();
    let mut vmap = pinned_vertices.clone();
    let mut used: BTreeSet<VertexId> = vmap.values().cloned().collect();
    let candidates: Vec<VertexId> = to
        .o_part
        .iter()
        .filter(|w| !used.contains(*w))
        .cloned()
        .collect();
    if search_iso(s, param_map, &free, 0, &candidates, &mut used, &mut vmap) {
        let emb = Embedding {
            vertex_map: vmap,
            param_map: param_map.clone(),
        };
        emb.verify(s, s).ok()?;
        Some(emb)
    } else {
        None
    }
}

fn search_iso(
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
        if search_iso(s, pmap, free, idx + 1, candidates, used, vmap) {
            return true;
        }
        vmap.remove(v);
        used.remove(w);
    }
    false
}

/// Inputs for the three-way amalgam, satisfying its hypothesis gate. With
/// `rename` the a-part of the second pair is a mirrored copy under fresh
/// identifiers and the isomorphism is recovered by search; otherwise it is
/// the a-part itself with the identity map.
pub struct TripleInstance {
    pub base: Structure,
    pub ab: PairData,
    pub ac: PairData,
    pub bc: PairData,
    pub iso: Embedding,
}

pub fn triple_instance(
    rng: &mut ChaCha8Rng,
    variant: &TheoryVariant,
    rename: bool,
) -> TripleInstance {
    let k = variant.color_count();
    let core_n = rng.gen_range(2..=3);
    let core_params = rng.gen_range(0..=1);
    // A connected core: row extensions then flood every attached side
    // through its attachment edge, which keeps foreign images out of the
    // other sides.
    let mut profile = GenProfile::new(variant.clone(), core_n, core_params);
    profile.attach_probability = 1.0;
    let mut s = random_instance(rng, &profile);
    let core_vertices = s.forest().vertex_set();
    let core_params: BTreeSet<ParamId> = s.params().clone();

    // The a-side (and its mirror when renaming) share one recipe; b and c
    // get their own.
    // Every side attaches to the core: row extensions then propagate
    // through attachment edges only, never free-rooting in a foreign
    // component, so parts meet exactly in the base.
    let attach_a = {
        let vs: Vec<&VertexId> = core_vertices.iter().collect();
        Some(vs[rng.gen_range(0..vs.len())].clone())
    };
    let n_a = rng.gen_range(2..=3);
    let recipe_a = side_recipe(rng, n_a, attach_a.is_some(), k);
    let a_param_recipe = (rng.gen_range(0..recipe_a.edges.len()), rng.gen_range(1..=k));

    let (grown, a_names) = attach_side(&s, &recipe_a, "a", attach_a.as_ref());
    s = grown;
    let (grown, pa) = side_param(&s, &a_names, a_param_recipe.0, a_param_recipe.1);
    s = grown;
    let a_params: BTreeSet<ParamId> = [pa.clone()].into();

    let (a2_names, a2_params) = if rename {
        let (grown, names) = attach_side(&s, &recipe_a, "z", attach_a.as_ref());
        s = grown;
        let (grown, pz) = side_param(&s, &names, a_param_recipe.0, a_param_recipe.1);
        s = grown;
        (names, BTreeSet::from([pz]))
    } else {
        (a_names.clone(), a_params.clone())
    };

    let mut other_sides = Vec::new();
    for prefix in ["b", "c"] {
        let attach = {
            let vs: Vec<&VertexId> = core_vertices.iter().collect();
            Some(vs[rng.gen_range(0..vs.len())].clone())
        };
        let n = rng.gen_range(2..=3);
        let recipe = side_recipe(rng, n, attach.is_some(), k);
        let (grown, names) = attach_side(&s, &recipe, prefix, attach.as_ref());
        s = grown;
        let mut params = BTreeSet::new();
        if rng.gen_bool(0.7) {
            let (grown, p) = side_param(&s, &names, rng.gen_range(0..names.len()), rng.gen_range(1..=k));
            s = grown;
            params.insert(p);
        }
        other_sides.push((names, params));
    }
    if rng.gen_bool(0.4) {
        s = complete_budgeted(&s, 1).expect("completion succeeds");
    }

    // The base closes under its own params only: foreign images at base
    // vertices belong to the parts, which keeps mirrored a-parts equal in
    // type over the base.
    let base_handle = closure_of(
        &s,
        &SubsetHandle {
            o_part: core_vertices,
            p_part: core_params.clone(),
        },
        None,
    )
    .expect("base closure");

    let part = |s: &Structure, names: &[VertexId], params: &BTreeSet<ParamId>| -> SubsetHandle {
        let seed = SubsetHandle {
            o_part: base_handle
                .o_part
                .iter()
                .cloned()
                .chain(names.iter().cloned())
                .collect(),
            p_part: base_handle
                .p_part
                .iter()
                .cloned()
                .chain(params.iter().cloned())
                .collect(),
        };
        closure_of(s, &seed, None).expect("part closure")
    };
    let a_handle = part(&s, &a_names, &a_params);
    let a2_handle = part(&s, &a2_names, &a2_params);
    let (b_names, b_params) = &other_sides[0];
    let (c_names, c_params) = &other_sides[1];
    let b_handle = part(&s, b_names, b_params);
    let c_handle = part(&s, c_names, c_params);

    let iso = if rename {
        let mut pinned: BTreeMap<VertexId, VertexId> = base_handle
            .o_part
            .iter()
            .map(|v| (v.clone(), v.clone()))
            .collect();
        for (x, z) in a_names.iter().zip(&a2_names) {
            // The base closure may have absorbed a side vertex; absorption
            // mirrors, so the pin stays with the base identity.
            if base_handle.o_part.contains(x) {
                assert!(base_handle.o_part.contains(z), "asymmetric base absorption");
                continue;
            }
            pinned.insert(x.clone(), z.clone());
        }
        let mut pmap: BTreeMap<ParamId, ParamId> = base_handle
            .p_part
            .iter()
            .map(|p| (p.clone(), p.clone()))
            .collect();
        for (p, q) in a_params.iter().zip(&a2_params) {
            pmap.insert(p.clone(), q.clone());
        }
        find_iso(&s, &pinned, &pmap, &a_handle, &a2_handle)
            .expect("mirrored sides admit an isomorphism")
    } else {
        Embedding::identity(&a_handle)
    };

    let base = s.induced(&base_handle).expect("base slice");
    debug_assert!(
        independent(&s, &base_handle, &a_handle, &b_handle, 0)
            .unwrap()
            .0,
        "generated sides must be independent"
    );
    TripleInstance {
        base,
        ab: PairData {
            structure: s.clone(),
            left: a_handle,
            right: b_handle.clone(),
        },
        ac: PairData {
            structure: s.clone(),
            left: a2_handle,
            right: c_handle.clone(),
        },
        bc: PairData {
            structure: s,
            left: b_handle,
            right: c_handle,
        },
    iso,
    }
}

/// A spider forest: a hub with `legs` paths of random lengths and edge
/// colors. Returns the forest and the legs as vertex lists ordered hub
/// outward (hub excluded).
pub fn spider(
    rng: &mut ChaCha8Rng,
    color_count: u8,
    legs: usize,
    min_leg: usize,
    max_leg: usize,
) -> (Forest, Vec<Vec<VertexId>>) {
    let mut f = Forest::new(color_count);
    let hub = VertexId::new("h");
    f.add_vertex(hub.clone()).unwrap();
    let mut out = Vec::new();
    for leg in 0..legs {
        let len = rng.gen_range(min_leg..=max_leg);
        let mut prev = hub.clone();
        let mut vertices = Vec::new();
        for j in 0..len {
            let v = VertexId::new(format!("l{leg}_{j}"));
            f.add_vertex(v.clone()).unwrap();
            let color = Color::new(rng.gen_range(1..=color_count)).unwrap();
            f.add_edge(color, &prev, &v).unwrap();
            vertices.push(v.clone());
            prev = v;
        }
        out.push(vertices);
    }
    (f, out)
}
