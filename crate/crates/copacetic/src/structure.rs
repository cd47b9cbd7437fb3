//! Two-sorted structures: a forest on sort `O` plus a parameter set `P`,
//! where every parameter assigns every vertex exactly one color.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::CoreError;
use crate::forest::{valid_identifier, Forest, VertexId};
use crate::variant::{Color, TheoryVariant};

/// Opaque parameter identifier; equality is string equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ParamId(String);

impl ParamId {
    pub fn new(id: impl Into<String>) -> ParamId {
        ParamId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ParamId {
    fn from(value: &str) -> ParamId {
        ParamId::new(value)
    }
}

impl From<String> for ParamId {
    fn from(value: String) -> ParamId {
        ParamId::new(value)
    }
}

/// A partial vertex coloring: the coloring one actual or hypothetical
/// parameter induces on a subset of a forest's vertices.
///
/// Validity against the capacity bounds is a separate check
/// ([`crate::axioms::check_c4_coloring`]); the type itself only carries the
/// assignment.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct C4Coloring {
    assignment: BTreeMap<VertexId, Color>,
}

impl C4Coloring {
    pub fn new() -> C4Coloring {
        C4Coloring::default()
    }

    pub fn from_assignment(assignment: BTreeMap<VertexId, Color>) -> C4Coloring {
        C4Coloring { assignment }
    }

    /// The row of `param` restricted to `domain`.
    pub fn from_row(
        s: &Structure,
        param: &ParamId,
        domain: &BTreeSet<VertexId>,
    ) -> Result<C4Coloring, CoreError> {
        let mut assignment = BTreeMap::new();
        for v in domain {
            assignment.insert(v.clone(), s.rho(param, v)?);
        }
        Ok(C4Coloring { assignment })
    }

    pub fn set(&mut self, v: VertexId, color: Color) {
        self.assignment.insert(v, color);
    }

    pub fn unset(&mut self, v: &VertexId) {
        self.assignment.remove(v);
    }

    pub fn get(&self, v: &VertexId) -> Option<Color> {
        self.assignment.get(v).copied()
    }

    pub fn domain(&self) -> BTreeSet<VertexId> {
        self.assignment.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, Color)> {
        self.assignment.iter().map(|(v, c)| (v, *c))
    }

    pub fn restrict(&self, domain: &BTreeSet<VertexId>) -> C4Coloring {
        C4Coloring {
            assignment: self
                .assignment
                .iter()
                .filter(|(v, _)| domain.contains(*v))
                .map(|(v, c)| (v.clone(), *c))
                .collect(),
        }
    }

    /// True iff `self` agrees with `other` on all of `other`'s domain.
    pub fn extends(&self, other: &C4Coloring) -> bool {
        other
            .assignment
            .iter()
            .all(|(v, c)| self.get(v) == Some(*c))
    }

    /// Union of two colorings; errors on a conflicting assignment.
    pub fn merge(&self, other: &C4Coloring) -> Result<C4Coloring, CoreError> {
        let mut out = self.clone();
        for (v, c) in other.iter() {
            match out.get(v) {
                None => out.set(v.clone(), c),
                Some(prev) if prev == c => {}
                Some(_) => {
                    return Err(CoreError::BadVariant(format!(
                        "conflicting colors for `{v}` in coloring merge"
                    )))
                }
            }
        }
        Ok(out)
    }
}

impl FromIterator<(VertexId, Color)> for C4Coloring {
    fn from_iter<T: IntoIterator<Item = (VertexId, Color)>>(iter: T) -> C4Coloring {
        C4Coloring {
            assignment: iter.into_iter().collect(),
        }
    }
}

/// A pair of subsets (vertices, params) referencing one ambient structure.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SubsetHandle {
    pub o_part: BTreeSet<VertexId>,
    pub p_part: BTreeSet<ParamId>,
}

impl SubsetHandle {
    pub fn new(
        o_part: impl IntoIterator<Item = VertexId>,
        p_part: impl IntoIterator<Item = ParamId>,
    ) -> SubsetHandle {
        SubsetHandle {
            o_part: o_part.into_iter().collect(),
            p_part: p_part.into_iter().collect(),
        }
    }

    pub fn empty() -> SubsetHandle {
        SubsetHandle::default()
    }

    pub fn vertices(o_part: impl IntoIterator<Item = VertexId>) -> SubsetHandle {
        SubsetHandle::new(o_part, [])
    }

    pub fn union(&self, other: &SubsetHandle) -> SubsetHandle {
        SubsetHandle {
            o_part: self.o_part.union(&other.o_part).cloned().collect(),
            p_part: self.p_part.union(&other.p_part).cloned().collect(),
        }
    }

    pub fn is_subset_of(&self, other: &SubsetHandle) -> bool {
        self.o_part.is_subset(&other.o_part) && self.p_part.is_subset(&other.p_part)
    }

    pub fn is_empty(&self) -> bool {
        self.o_part.is_empty() && self.p_part.is_empty()
    }

    /// All identifiers exist in the ambient structure.
    pub fn validate(&self, s: &Structure) -> Result<(), CoreError> {
        for v in &self.o_part {
            if !s.forest().contains(v) {
                return Err(CoreError::UnknownVertex(v.as_str().to_owned()));
            }
        }
        for p in &self.p_part {
            if !s.params().contains(p) {
                return Err(CoreError::UnknownParam(p.as_str().to_owned()));
            }
        }
        Ok(())
    }
}

/// A forest plus parameters and a total color assignment
/// `rho: P x O -> 1..=k`.
///
/// Totality of `rho` is enforced at construction. The capacity bounds are
/// enforced at construction only when the builder runs in strict mode;
/// lenient structures exist so that verifiers have something to report on.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Structure {
    forest: Forest,
    params: BTreeSet<ParamId>,
    rho: BTreeMap<ParamId, BTreeMap<VertexId, Color>>,
    variant: TheoryVariant,
    strict: bool,
}

impl Structure {
    /// The empty structure over a variant.
    pub fn empty(variant: TheoryVariant) -> Structure {
        Structure {
            forest: Forest::new(variant.color_count()),
            params: BTreeSet::new(),
            rho: BTreeMap::new(),
            variant,
            strict: true,
        }
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn variant(&self) -> &TheoryVariant {
        &self.variant
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    pub fn params(&self) -> &BTreeSet<ParamId> {
        &self.params
    }

    pub fn vertex_count(&self) -> usize {
        self.forest.vertex_count()
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn rho(&self, param: &ParamId, vertex: &VertexId) -> Result<Color, CoreError> {
        let row = self
            .rho
            .get(param)
            .ok_or_else(|| CoreError::UnknownParam(param.as_str().to_owned()))?;
        row.get(vertex).copied().ok_or_else(|| {
            if self.forest.contains(vertex) {
                CoreError::MissingRho {
                    param: param.as_str().to_owned(),
                    vertex: vertex.as_str().to_owned(),
                }
            } else {
                CoreError::UnknownVertex(vertex.as_str().to_owned())
            }
        })
    }

    pub fn rho_row(&self, param: &ParamId) -> Result<&BTreeMap<VertexId, Color>, CoreError> {
        self.rho
            .get(param)
            .ok_or_else(|| CoreError::UnknownParam(param.as_str().to_owned()))
    }

    /// Handle covering the whole structure.
    pub fn full_handle(&self) -> SubsetHandle {
        SubsetHandle {
            o_part: self.forest.vertex_set(),
            p_part: self.params.clone(),
        }
    }

    /// The induced substructure on a handle: the forest restricted to the
    /// handle's vertices, the handle's params, rho restricted to both.
    pub fn induced(&self, handle: &SubsetHandle) -> Result<Structure, CoreError> {
        handle.validate(self)?;
        let mut forest = Forest::new(self.variant.color_count());
        for v in &handle.o_part {
            forest.insert_vertex_unchecked(v.clone());
        }
        for (u, v, c) in self.forest.edges() {
            if handle.o_part.contains(u) && handle.o_part.contains(v) {
                forest.insert_edge_unchecked(c, u, v);
            }
        }
        let mut rho = BTreeMap::new();
        for p in &handle.p_part {
            let row = &self.rho[p];
            rho.insert(
                p.clone(),
                handle
                    .o_part
                    .iter()
                    .map(|v| (v.clone(), row[v]))
                    .collect::<BTreeMap<_, _>>(),
            );
        }
        Ok(Structure {
            forest,
            params: handle.p_part.clone(),
            rho,
            variant: self.variant.clone(),
            strict: self.strict,
        })
    }

    /// Equality of forest, params, rho, and variant, ignoring the strict
    /// flag.
    pub fn same_content(&self, other: &Structure) -> bool {
        self.forest == other.forest
            && self.params == other.params
            && self.rho == other.rho
            && self.variant == other.variant
    }

    // Mutators for the construction module. Callers keep the invariants:
    // rho stays total, the forest stays acyclic.

    pub(crate) fn forest_mut(&mut self) -> &mut Forest {
        &mut self.forest
    }

    /// Add a fresh vertex together with its full rho column.
    pub(crate) fn push_vertex(
        &mut self,
        v: VertexId,
        column: &BTreeMap<ParamId, Color>,
    ) -> Result<(), CoreError> {
        self.forest.add_vertex(v.clone())?;
        for p in &self.params {
            let c = column
                .get(p)
                .copied()
                .ok_or_else(|| CoreError::MissingRho {
                    param: p.as_str().to_owned(),
                    vertex: v.as_str().to_owned(),
                })?;
            self.rho.get_mut(p).unwrap().insert(v.clone(), c);
        }
        Ok(())
    }

    /// Add a fresh param with a total row.
    pub(crate) fn push_param(
        &mut self,
        p: ParamId,
        row: BTreeMap<VertexId, Color>,
    ) -> Result<(), CoreError> {
        if !valid_identifier(p.as_str()) {
            return Err(CoreError::BadIdentifier(p.as_str().to_owned()));
        }
        if self.params.contains(&p) {
            return Err(CoreError::DuplicateParam(p.as_str().to_owned()));
        }
        for v in self.forest.vertices() {
            if !row.contains_key(v) {
                return Err(CoreError::MissingRho {
                    param: p.as_str().to_owned(),
                    vertex: v.as_str().to_owned(),
                });
            }
        }
        self.params.insert(p.clone());
        self.rho.insert(p, row);
        Ok(())
    }

}

/// Builder enforcing C1-C3 always and C4 in strict mode (the default).
#[derive(Clone, Debug)]
pub struct StructureBuilder {
    forest: Forest,
    params: BTreeSet<ParamId>,
    rho: BTreeMap<ParamId, BTreeMap<VertexId, Color>>,
    variant: TheoryVariant,
    strict: bool,
}

impl StructureBuilder {
    pub fn new(variant: TheoryVariant) -> StructureBuilder {
        StructureBuilder {
            forest: Forest::new(variant.color_count()),
            params: BTreeSet::new(),
            rho: BTreeMap::new(),
            variant,
            strict: true,
        }
    }

    pub fn strict(mut self, strict: bool) -> StructureBuilder {
        self.strict = strict;
        self
    }

    pub fn vertex(mut self, v: impl Into<VertexId>) -> Result<StructureBuilder, CoreError> {
        self.forest.add_vertex(v.into())?;
        Ok(self)
    }

    pub fn param(mut self, p: impl Into<ParamId>) -> Result<StructureBuilder, CoreError> {
        let p = p.into();
        if !valid_identifier(p.as_str()) {
            return Err(CoreError::BadIdentifier(p.as_str().to_owned()));
        }
        if !self.params.insert(p.clone()) {
            return Err(CoreError::DuplicateParam(p.as_str().to_owned()));
        }
        self.rho.insert(p, BTreeMap::new());
        Ok(self)
    }

    pub fn edge(
        mut self,
        color: u8,
        u: impl Into<VertexId>,
        v: impl Into<VertexId>,
    ) -> Result<StructureBuilder, CoreError> {
        let color = Color::new(color)?;
        self.forest.add_edge(color, &u.into(), &v.into())?;
        Ok(self)
    }

    pub fn rho(
        mut self,
        color: u8,
        p: impl Into<ParamId>,
        v: impl Into<VertexId>,
    ) -> Result<StructureBuilder, CoreError> {
        let color = Color::new(color)?;
        self.forest.check_color(color)?;
        let p = p.into();
        let v = v.into();
        if !self.forest.contains(&v) {
            return Err(CoreError::UnknownVertex(v.as_str().to_owned()));
        }
        let row = self
            .rho
            .get_mut(&p)
            .ok_or_else(|| CoreError::UnknownParam(p.as_str().to_owned()))?;
        row.insert(v, color);
        Ok(self)
    }

    pub fn build(self) -> Result<Structure, CoreError> {
        // C3: rho total.
        for p in &self.params {
            let row = &self.rho[p];
            for v in self.forest.vertices() {
                if !row.contains_key(v) {
                    return Err(CoreError::MissingRho {
                        param: p.as_str().to_owned(),
                        vertex: v.as_str().to_owned(),
                    });
                }
            }
        }
        let s = Structure {
            forest: self.forest,
            params: self.params,
            rho: self.rho,
            variant: self.variant,
            strict: self.strict,
        };
        if s.strict {
            let report = crate::axioms::verify_copacetic(&s);
            if !report.is_empty() {
                return Err(CoreError::NotCopacetic(report));
            }
        }
        Ok(s)
    }
}

/// Injective maps between two structures preserving edge colors, non-edges
/// within image pairs, and rho values. Domain and image are the maps' keys
/// and values; identity embeddings are the common case.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Embedding {
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub param_map: BTreeMap<ParamId, ParamId>,
}

impl Embedding {
    /// The identity embedding on a handle.
    pub fn identity(handle: &SubsetHandle) -> Embedding {
        Embedding {
            vertex_map: handle
                .o_part
                .iter()
                .map(|v| (v.clone(), v.clone()))
                .collect(),
            param_map: handle
                .p_part
                .iter()
                .map(|p| (p.clone(), p.clone()))
                .collect(),
        }
    }

    pub fn domain(&self) -> SubsetHandle {
        SubsetHandle {
            o_part: self.vertex_map.keys().cloned().collect(),
            p_part: self.param_map.keys().cloned().collect(),
        }
    }

    pub fn image(&self) -> SubsetHandle {
        SubsetHandle {
            o_part: self.vertex_map.values().cloned().collect(),
            p_part: self.param_map.values().cloned().collect(),
        }
    }

    pub fn map_vertex(&self, v: &VertexId) -> Result<&VertexId, CoreError> {
        self.vertex_map
            .get(v)
            .ok_or_else(|| CoreError::UnknownVertex(v.as_str().to_owned()))
    }

    pub fn map_param(&self, p: &ParamId) -> Result<&ParamId, CoreError> {
        self.param_map
            .get(p)
            .ok_or_else(|| CoreError::UnknownParam(p.as_str().to_owned()))
    }

    pub fn inverse(&self) -> Result<Embedding, CoreError> {
        let vertex_map: BTreeMap<_, _> = self
            .vertex_map
            .iter()
            .map(|(a, b)| (b.clone(), a.clone()))
            .collect();
        let param_map: BTreeMap<_, _> = self
            .param_map
            .iter()
            .map(|(a, b)| (b.clone(), a.clone()))
            .collect();
        if vertex_map.len() != self.vertex_map.len() || param_map.len() != self.param_map.len() {
            return Err(CoreError::EmbeddingViolation("map is not injective".into()));
        }
        Ok(Embedding {
            vertex_map,
            param_map,
        })
    }

    /// Verify this is a partial isomorphism from `from` into `to` on its
    /// domain: injective, edge- and non-edge-preserving with colors, and
    /// rho-preserving on domain params x domain vertices.
    pub fn verify(&self, from: &Structure, to: &Structure) -> Result<(), CoreError> {
        self.inverse()?; // injectivity
        for (v, w) in &self.vertex_map {
            if !from.forest().contains(v) {
                return Err(CoreError::UnknownVertex(v.as_str().to_owned()));
            }
            if !to.forest().contains(w) {
                return Err(CoreError::UnknownVertex(w.as_str().to_owned()));
            }
        }
        for (p, q) in &self.param_map {
            if !from.params().contains(p) {
                return Err(CoreError::UnknownParam(p.as_str().to_owned()));
            }
            if !to.params().contains(q) {
                return Err(CoreError::UnknownParam(q.as_str().to_owned()));
            }
        }
        for (u, fu) in &self.vertex_map {
            for (v, fv) in &self.vertex_map {
                if u >= v {
                    continue;
                }
                let here = from.forest().edge_color(u, v)?;
                let there = to.forest().edge_color(fu, fv)?;
                if here != there {
                    return Err(CoreError::EmbeddingViolation(format!(
                        "edge mismatch on `{u}`-`{v}`"
                    )));
                }
            }
        }
        for (p, fp) in &self.param_map {
            for (v, fv) in &self.vertex_map {
                if from.rho(p, v)? != to.rho(fp, fv)? {
                    return Err(CoreError::EmbeddingViolation(format!(
                        "rho mismatch at param `{p}` vertex `{v}`"
                    )));
                }
            }
        }
        Ok(())
    }
}
