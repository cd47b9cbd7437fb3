//! Edge-colored forests on sort `O` and their elementary geometry: unique
//! paths, tree distances, and unit-ball boundaries.

use std::collections::VecDeque;
use std::fmt;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::CoreError;
use crate::variant::Color;

/// Opaque vertex identifier; equality is string equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(id: impl Into<String>) -> VertexId {
        VertexId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(value: &str) -> VertexId {
        VertexId::new(value)
    }
}

impl From<String> for VertexId {
    fn from(value: String) -> VertexId {
        VertexId::new(value)
    }
}

/// Identifiers in files and reports are `[A-Za-z0-9_]+`.
pub(crate) fn valid_identifier(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Forest distance. `Infinite` is a distinguished value so threshold
/// comparisons never overflow or silently pass.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Distance {
    Finite(u64),
    Infinite,
}

impl Distance {
    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    /// `self > threshold`, with `Infinite` exceeding everything.
    pub fn exceeds(self, threshold: u64) -> bool {
        match self {
            Distance::Finite(d) => d > threshold,
            Distance::Infinite => true,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

/// Finite acyclic simple graph with a total edge coloring in `1..=k`.
///
/// At most one edge (hence one color) per vertex pair, no self-edges, and no
/// cycles; the checked mutators reject anything else.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Forest {
    color_count: u8,
    adj: BTreeMap<VertexId, BTreeMap<VertexId, Color>>,
}

impl Forest {
    pub fn new(color_count: u8) -> Forest {
        Forest {
            color_count,
            adj: BTreeMap::new(),
        }
    }

    pub fn color_count(&self) -> u8 {
        self.color_count
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|n| n.len()).sum::<usize>() / 2
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.adj.contains_key(v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.adj.keys()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.adj.keys().cloned().collect()
    }

    /// Edges with endpoints normalized `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId, Color)> {
        self.adj.iter().flat_map(|(u, nbrs)| {
            nbrs.iter()
                .filter(move |(v, _)| u < *v)
                .map(move |(v, c)| (u, v, *c))
        })
    }

    pub fn add_vertex(&mut self, v: VertexId) -> Result<(), CoreError> {
        if !valid_identifier(v.as_str()) {
            return Err(CoreError::BadIdentifier(v.as_str().to_owned()));
        }
        if self.adj.contains_key(&v) {
            return Err(CoreError::DuplicateVertex(v.as_str().to_owned()));
        }
        self.adj.insert(v, BTreeMap::new());
        Ok(())
    }

    /// Insert an edge, rejecting self-edges, duplicates, out-of-range colors,
    /// and anything that would close a cycle.
    pub fn add_edge(&mut self, color: Color, u: &VertexId, v: &VertexId) -> Result<(), CoreError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        self.check_color(color)?;
        if u == v {
            return Err(CoreError::SelfEdge(u.as_str().to_owned()));
        }
        if self.adj[u].contains_key(v) {
            return Err(CoreError::DuplicateEdge(
                u.as_str().to_owned(),
                v.as_str().to_owned(),
            ));
        }
        if self.connected(u, v) {
            return Err(CoreError::WouldCycle(
                u.as_str().to_owned(),
                v.as_str().to_owned(),
            ));
        }
        self.insert_edge_unchecked(color, u, v);
        Ok(())
    }

    /// Bulk-assembly escape hatch for constructors that justify acyclicity
    /// separately; pair with [`Forest::validate`].
    pub(crate) fn insert_edge_unchecked(&mut self, color: Color, u: &VertexId, v: &VertexId) {
        self.adj.get_mut(u).unwrap().insert(v.clone(), color);
        self.adj.get_mut(v).unwrap().insert(u.clone(), color);
    }

    pub(crate) fn insert_vertex_unchecked(&mut self, v: VertexId) {
        self.adj.entry(v).or_default();
    }

    /// Full re-check of the forest invariants: symmetry, irreflexivity,
    /// color range, acyclicity.
    pub(crate) fn validate(&self) -> Result<(), CoreError> {
        for (u, nbrs) in &self.adj {
            for (v, c) in nbrs {
                if u == v {
                    return Err(CoreError::SelfEdge(u.as_str().to_owned()));
                }
                self.check_color(*c)?;
                if self.adj.get(v).and_then(|n| n.get(u)) != Some(c) {
                    return Err(CoreError::DuplicateEdge(
                        u.as_str().to_owned(),
                        v.as_str().to_owned(),
                    ));
                }
            }
        }
        // Forest iff every component has |E| = |V| - 1.
        let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
        for root in self.adj.keys() {
            if seen.contains(root) {
                continue;
            }
            let mut stack = vec![(root, None::<&VertexId>)];
            seen.insert(root);
            while let Some((v, parent)) = stack.pop() {
                for w in self.adj[v].keys() {
                    if Some(w) == parent {
                        continue;
                    }
                    if !seen.insert(w) {
                        return Err(CoreError::WouldCycle(
                            v.as_str().to_owned(),
                            w.as_str().to_owned(),
                        ));
                    }
                    stack.push((w, Some(v)));
                }
            }
        }
        Ok(())
    }

    pub fn neighbors(&self, v: &VertexId) -> Result<&BTreeMap<VertexId, Color>, CoreError> {
        self.adj
            .get(v)
            .ok_or_else(|| CoreError::UnknownVertex(v.as_str().to_owned()))
    }

    pub fn edge_color(&self, u: &VertexId, v: &VertexId) -> Result<Option<Color>, CoreError> {
        self.check_vertex(v)?;
        Ok(self.neighbors(u)?.get(v).copied())
    }

    /// Length of the unique path between `u` and `v`; `Infinite` if they lie
    /// in distinct components; zero if `u == v`.
    pub fn tree_distance(&self, u: &VertexId, v: &VertexId) -> Result<Distance, CoreError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(Distance::Finite(0));
        }
        let mut dist: BTreeMap<&VertexId, u64> = BTreeMap::new();
        let mut queue = VecDeque::new();
        dist.insert(u, 0);
        queue.push_back(u);
        while let Some(x) = queue.pop_front() {
            let d = dist[x];
            for y in self.adj[x].keys() {
                if !dist.contains_key(y) {
                    if y == v {
                        return Ok(Distance::Finite(d + 1));
                    }
                    dist.insert(y, d + 1);
                    queue.push_back(y);
                }
            }
        }
        Ok(Distance::Infinite)
    }

    /// The unique simple path `u..v` inclusive, or `None` if disconnected.
    pub fn unique_path(
        &self,
        u: &VertexId,
        v: &VertexId,
    ) -> Result<Option<Vec<VertexId>>, CoreError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(Some(vec![u.clone()]));
        }
        let mut parent: BTreeMap<&VertexId, &VertexId> = BTreeMap::new();
        let mut queue = VecDeque::new();
        parent.insert(u, u);
        queue.push_back(u);
        'bfs: while let Some(x) = queue.pop_front() {
            for y in self.adj[x].keys() {
                if !parent.contains_key(y) {
                    parent.insert(y, x);
                    if y == v {
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
        }
        if !parent.contains_key(v) {
            return Ok(None);
        }
        let mut path = vec![v.clone()];
        let mut cur = v;
        while cur != u {
            cur = parent[cur];
            path.push(cur.clone());
        }
        path.reverse();
        Ok(Some(path))
    }

    /// All vertices joined to `center` by a color-`color` edge: the boundary
    /// of the unit ball of that color.
    pub fn ball_boundary(
        &self,
        center: &VertexId,
        color: Color,
    ) -> Result<BTreeSet<VertexId>, CoreError> {
        self.check_color(color)?;
        Ok(self
            .neighbors(center)?
            .iter()
            .filter(|(_, c)| **c == color)
            .map(|(v, _)| v.clone())
            .collect())
    }

    /// The component containing `v`.
    pub fn component_of(&self, v: &VertexId) -> Result<BTreeSet<VertexId>, CoreError> {
        self.check_vertex(v)?;
        let mut seen = BTreeSet::new();
        let mut stack = vec![v];
        seen.insert(v.clone());
        while let Some(x) = stack.pop() {
            for y in self.adj[x].keys() {
                if seen.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
        Ok(seen)
    }

    /// All components, keyed by their least vertex.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.adj.keys() {
            if !seen.contains(v) {
                let comp = self.component_of(v).unwrap();
                seen.extend(comp.iter().cloned());
                out.push(comp);
            }
        }
        out
    }

    pub(crate) fn same_component(&self, u: &VertexId, v: &VertexId) -> bool {
        self.connected(u, v)
    }

    /// Minimum distance between two nonempty vertex sets.
    pub fn distance_between_sets(
        &self,
        from: &BTreeSet<VertexId>,
        to: &BTreeSet<VertexId>,
    ) -> Result<Distance, CoreError> {
        Ok(match self.path_between_sets(from, to)? {
            Some(path) => Distance::Finite(path.len() as u64 - 1),
            None => Distance::Infinite,
        })
    }

    /// The shortest path from `from` to `to`, endpoints included. In a forest
    /// with both sets connected this path is unique; for arbitrary sets it is
    /// the deterministic BFS choice (sources scanned in ascending order).
    pub fn path_between_sets(
        &self,
        from: &BTreeSet<VertexId>,
        to: &BTreeSet<VertexId>,
    ) -> Result<Option<Vec<VertexId>>, CoreError> {
        for v in from.iter().chain(to.iter()) {
            self.check_vertex(v)?;
        }
        if from.is_empty() || to.is_empty() {
            return Ok(None);
        }
        if let Some(v) = from.intersection(to).next() {
            return Ok(Some(vec![v.clone()]));
        }
        let mut parent: BTreeMap<&VertexId, Option<&VertexId>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for v in from {
            parent.insert(v, None);
            queue.push_back(v);
        }
        let mut hit: Option<&VertexId> = None;
        'bfs: while let Some(x) = queue.pop_front() {
            for y in self.adj[x].keys() {
                if !parent.contains_key(y) {
                    parent.insert(y, Some(x));
                    if to.contains(y) {
                        hit = Some(y);
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
        }
        let Some(end) = hit else {
            return Ok(None);
        };
        let mut path = vec![end.clone()];
        let mut cur = end;
        while let Some(p) = parent[cur] {
            path.push(p.clone());
            cur = p;
        }
        path.reverse();
        Ok(Some(path))
    }

    fn connected(&self, u: &VertexId, v: &VertexId) -> bool {
        if u == v {
            return true;
        }
        let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
        let mut stack = vec![u];
        seen.insert(u);
        while let Some(x) = stack.pop() {
            for y in self.adj[x].keys() {
                if y == v {
                    return true;
                }
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        false
    }

    fn check_vertex(&self, v: &VertexId) -> Result<(), CoreError> {
        if self.adj.contains_key(v) {
            Ok(())
        } else {
            Err(CoreError::UnknownVertex(v.as_str().to_owned()))
        }
    }

    pub(crate) fn check_color(&self, c: Color) -> Result<(), CoreError> {
        if c.get() as usize <= self.color_count as usize {
            Ok(())
        } else {
            Err(CoreError::ColorOutOfRange {
                color: c.get(),
                k: self.color_count,
            })
        }
    }
}
