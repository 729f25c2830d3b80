//! Bigraded quivers, paths and Dynkin classification.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bidegree {
    pub weight: u32,
    pub degree: i32,
}

impl Bidegree {
    pub const ZERO: Bidegree = Bidegree { weight: 0, degree: 0 };

    pub fn new(weight: u32, degree: i32) -> Self {
        Self { weight, degree }
    }
}

impl core::ops::Add for Bidegree {
    type Output = Bidegree;
    fn add(self, o: Bidegree) -> Bidegree {
        Bidegree { weight: self.weight + o.weight, degree: self.degree + o.degree }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub source: usize,
    pub target: usize,
    pub bidegree: Bidegree,
}

/// A quiver whose arrows carry a (weight, degree) bidegree. Plain quivers
/// have every arrow in bidegree (0, 0).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

pub type BigradedQuiver = Quiver;

impl Quiver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, label: &str) -> Result<usize> {
        if self.vertices.iter().any(|v| v == label) {
            return Err(Error::DuplicateId(label.to_string()));
        }
        self.vertices.push(label.to_string());
        Ok(self.vertices.len() - 1)
    }

    pub fn add_arrow(&mut self, label: &str, source: usize, target: usize, bidegree: Bidegree) -> Result<usize> {
        if self.arrows.iter().any(|a| a.label == label) {
            return Err(Error::DuplicateId(label.to_string()));
        }
        for v in [source, target] {
            if v >= self.vertices.len() {
                return Err(Error::UnknownVertex(v.to_string()));
            }
        }
        self.arrows.push(Arrow { label: label.to_string(), source, target, bidegree });
        Ok(self.arrows.len() - 1)
    }

    /// Builds from vertex labels and `(label, source, target)` triples, all in bidegree (0, 0).
    pub fn from_edges(vertices: &[&str], arrows: &[(&str, &str, &str)]) -> Result<Self> {
        let mut q = Self::new();
        for v in vertices {
            q.add_vertex(v)?;
        }
        for (label, s, t) in arrows {
            let s = q.vertex_index(s).ok_or_else(|| Error::UnknownVertex(s.to_string()))?;
            let t = q.vertex_index(t).ok_or_else(|| Error::UnknownVertex(t.to_string()))?;
            q.add_arrow(label, s, t, Bidegree::ZERO)?;
        }
        Ok(q)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_label(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    pub fn arrow(&self, a: usize) -> &Arrow {
        &self.arrows[a]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_index(&self, label: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.label == label)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order(|_| true).is_some()
    }

    /// Kahn's algorithm on the arrows selected by `keep`.
    fn topological_order(&self, keep: impl Fn(&Arrow) -> bool) -> Option<Vec<usize>> {
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for a in self.arrows.iter().filter(|a| keep(a)) {
            indeg[a.target] += 1;
            out[a.source].push(a.target);
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &t in &out[v] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    queue.push_back(t);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Vertices ordered so that every arrow goes from an earlier to a later vertex.
    pub fn topological_sort(&self) -> Result<Vec<usize>> {
        self.topological_order(|_| true).ok_or(Error::NotAcyclic)
    }

    pub fn has_weight_zero_cycle(&self) -> bool {
        self.topological_order(|a| a.bidegree.weight == 0).is_none()
    }

    pub fn dynkin_type(&self) -> Option<DynkinType> {
        classify_dynkin(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DynkinType {
    A(usize),
    D(usize),
    E6,
    E7,
    E8,
}

impl DynkinType {
    pub fn rank(self) -> usize {
        match self {
            DynkinType::A(n) | DynkinType::D(n) => n,
            DynkinType::E6 => 6,
            DynkinType::E7 => 7,
            DynkinType::E8 => 8,
        }
    }

    pub fn positive_roots(self) -> usize {
        match self {
            DynkinType::A(n) => n * (n + 1) / 2,
            DynkinType::D(n) => n * (n - 1),
            DynkinType::E6 => 36,
            DynkinType::E7 => 63,
            DynkinType::E8 => 120,
        }
    }

    pub fn coxeter_number(self) -> usize {
        match self {
            DynkinType::A(n) => n + 1,
            DynkinType::D(n) => 2 * n - 2,
            DynkinType::E6 => 12,
            DynkinType::E7 => 18,
            DynkinType::E8 => 30,
        }
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynkinType::A(n) => write!(f, "A{n}"),
            DynkinType::D(n) => write!(f, "D{n}"),
            DynkinType::E6 => write!(f, "E6"),
            DynkinType::E7 => write!(f, "E7"),
            DynkinType::E8 => write!(f, "E8"),
        }
    }
}

fn classify_dynkin(q: &Quiver) -> Option<DynkinType> {
    let n = q.vertex_count();
    if n == 0 || q.arrow_count() != n - 1 {
        return None;
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for a in q.arrows() {
        if a.source == a.target || !adj[a.source].insert(a.target) {
            return None;
        }
        adj[a.target].insert(a.source);
    }
    // n - 1 distinct edges plus connectivity makes a tree.
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return None;
    }
    let branch: Vec<usize> = (0..n).filter(|&v| adj[v].len() > 2).collect();
    match branch.as_slice() {
        [] => Some(DynkinType::A(n)),
        [c] if adj[*c].len() == 3 => {
            let mut legs: Vec<usize> = adj[*c]
                .iter()
                .map(|&start| {
                    let (mut prev, mut cur, mut len) = (*c, start, 1);
                    while let Some(&next) = adj[cur].iter().find(|&&w| w != prev) {
                        prev = cur;
                        cur = next;
                        len += 1;
                    }
                    len
                })
                .collect();
            legs.sort_unstable();
            match legs.as_slice() {
                [1, 1, _] => Some(DynkinType::D(n)),
                [1, 2, 2] => Some(DynkinType::E6),
                [1, 2, 3] => Some(DynkinType::E7),
                [1, 2, 4] => Some(DynkinType::E8),
                _ => None,
            }
        }
        _ => None,
    }
}

/// A path written source to target; an empty arrow list is the idempotent `e_source`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Self { source: v, target: v, arrows: Vec::new() }
    }

    pub fn arrow(q: &Quiver, a: usize) -> Self {
        let ar = q.arrow(a);
        Self { source: ar.source, target: ar.target, arrows: vec![a] }
    }

    pub fn from_arrows(q: &Quiver, arrows: &[usize]) -> Option<Self> {
        let (&first, &last) = (arrows.first()?, arrows.last()?);
        if arrows.windows(2).any(|w| q.arrow(w[0]).target != q.arrow(w[1]).source) {
            return None;
        }
        Some(Self { source: q.arrow(first).source, target: q.arrow(last).target, arrows: arrows.to_vec() })
    }

    /// Reads `a.b.c` (arrow labels) or `e<vertex>`.
    pub fn parse(q: &Quiver, s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some(v) = s.strip_prefix('e').and_then(|v| q.vertex_index(v)) {
            if q.arrow_index(s).is_none() {
                return Some(Self::trivial(v));
            }
        }
        let arrows: Option<Vec<usize>> = s.split('.').map(|a| q.arrow_index(a.trim())).collect();
        Self::from_arrows(q, &arrows?)
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn bidegree(&self, q: &Quiver) -> Bidegree {
        self.arrows.iter().fold(Bidegree::ZERO, |b, &a| b + q.arrow(a).bidegree)
    }

    /// "self then other", if composable.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.target != other.source {
            return None;
        }
        let mut arrows = Vec::with_capacity(self.arrows.len() + other.arrows.len());
        arrows.extend_from_slice(&self.arrows);
        arrows.extend_from_slice(&other.arrows);
        Some(Path { source: self.source, target: other.target, arrows })
    }

    pub fn label(&self, q: &Quiver) -> String {
        if self.arrows.is_empty() {
            return alloc::format!("e{}", q.vertex_label(self.source));
        }
        let mut s = String::new();
        for (i, &a) in self.arrows.iter().enumerate() {
            if i > 0 {
                s.push('.');
            }
            s.push_str(&q.arrow(a).label);
        }
        s
    }
}

/// Deterministic path order: weight, then length, then arrow indices.
pub fn path_order_key(q: &Quiver, p: &Path) -> (u32, usize, Vec<usize>) {
    (p.bidegree(q).weight, p.len(), p.arrows.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockKey {
    pub source: usize,
    pub target: usize,
    pub weight: u32,
    pub degree: i32,
}

impl BlockKey {
    pub fn new(source: usize, target: usize, weight: u32, degree: i32) -> Self {
        Self { source, target, weight, degree }
    }

    pub fn bidegree(&self) -> Bidegree {
        Bidegree::new(self.weight, self.degree)
    }

    pub fn with_degree(&self, degree: i32) -> Self {
        Self { degree, ..*self }
    }

    /// Key of a product of an element of `self` by one of `other`.
    pub fn compose(&self, other: &BlockKey) -> Option<BlockKey> {
        (self.target == other.source).then(|| BlockKey {
            source: self.source,
            target: other.target,
            weight: self.weight + other.weight,
            degree: self.degree + other.degree,
        })
    }
}

/// All paths of weight at most `max_weight`, grouped by block, each block in path order.
pub fn enumerate_all_paths(q: &Quiver, max_weight: u32) -> Result<BTreeMap<BlockKey, Vec<Path>>> {
    if q.has_weight_zero_cycle() {
        return Err(Error::WeightZeroCycle);
    }
    let mut out_arrows: Vec<Vec<usize>> = vec![Vec::new(); q.vertex_count()];
    for (i, a) in q.arrows().iter().enumerate() {
        out_arrows[a.source].push(i);
    }
    let mut blocks: BTreeMap<BlockKey, Vec<Path>> = BTreeMap::new();
    let mut frontier: Vec<(Path, Bidegree)> = (0..q.vertex_count()).map(|v| (Path::trivial(v), Bidegree::ZERO)).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (p, b) in frontier {
            for &a in &out_arrows[p.target] {
                let nb = b + q.arrow(a).bidegree;
                if nb.weight <= max_weight {
                    let mut arrows = p.arrows.clone();
                    arrows.push(a);
                    next.push((Path { source: p.source, target: q.arrow(a).target, arrows }, nb));
                }
            }
            blocks.entry(BlockKey::new(p.source, p.target, b.weight, b.degree)).or_default().push(p);
        }
        frontier = next;
    }
    // Breadth-first generation already yields length order; sorting fixes the lex tie-break.
    for paths in blocks.values_mut() {
        paths.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.arrows.cmp(&b.arrows)));
    }
    Ok(blocks)
}

pub fn enumerate_paths(q: &Quiver, from: usize, to: usize, max_weight: u32) -> Result<Vec<Path>> {
    let all = enumerate_all_paths(q, max_weight)?;
    let mut paths: Vec<Path> =
        all.into_iter().filter(|(k, _)| k.source == from && k.target == to).flat_map(|(_, v)| v).collect();
    paths.sort_by_cached_key(|p| path_order_key(q, p));
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a3() -> Quiver {
        Quiver::from_edges(&["1", "2", "3"], &[("b", "3", "2"), ("a", "2", "1")]).unwrap()
    }

    #[test]
    fn acyclicity() {
        assert!(a3().is_acyclic());
        let mut l = Quiver::new();
        l.add_vertex("1").unwrap();
        l.add_arrow("l", 0, 0, Bidegree::ZERO).unwrap();
        assert!(!l.is_acyclic());
        let k = Quiver::from_edges(&["1", "2"], &[("a", "1", "2"), ("b", "1", "2")]).unwrap();
        assert!(k.is_acyclic());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut q = Quiver::new();
        q.add_vertex("1").unwrap();
        assert_eq!(q.add_vertex("1"), Err(Error::DuplicateId("1".into())));
        assert!(Quiver::from_edges(&["1"], &[("a", "1", "2")]).is_err());
    }

    #[test]
    fn dynkin_examples() {
        assert_eq!(a3().dynkin_type(), Some(DynkinType::A(3)));
        let k = Quiver::from_edges(&["1", "2"], &[("a", "1", "2"), ("b", "1", "2")]).unwrap();
        assert_eq!(k.dynkin_type(), None);
        let d4 = Quiver::from_edges(&["0", "1", "2", "3"], &[("a", "1", "0"), ("b", "2", "0"), ("c", "0", "3")]).unwrap();
        assert_eq!(d4.dynkin_type(), Some(DynkinType::D(4)));
        let e6 = Quiver::from_edges(
            &["c", "x1", "y1", "y2", "z1", "z2"],
            &[("a", "c", "x1"), ("b", "c", "y1"), ("d", "y1", "y2"), ("e", "c", "z1"), ("f", "z1", "z2")],
        )
        .unwrap();
        assert_eq!(e6.dynkin_type(), Some(DynkinType::E6));
        let affine_d4 = Quiver::from_edges(
            &["c", "1", "2", "3", "4"],
            &[("a", "1", "c"), ("b", "2", "c"), ("d", "3", "c"), ("e", "4", "c")],
        )
        .unwrap();
        assert_eq!(affine_d4.dynkin_type(), None);
    }

    #[test]
    fn enumerate_a2() {
        let q = Quiver::from_edges(&["1", "2"], &[("a", "2", "1")]).unwrap();
        let p = enumerate_paths(&q, 1, 0, 0).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].label(&q), "a");
        let e = enumerate_paths(&q, 0, 0, 0).unwrap();
        assert_eq!(e, vec![Path::trivial(0)]);
    }

    #[test]
    fn weight_zero_cycle_guard() {
        let mut q = Quiver::new();
        q.add_vertex("1").unwrap();
        q.add_arrow("l", 0, 0, Bidegree::ZERO).unwrap();
        assert_eq!(enumerate_all_paths(&q, 2), Err(Error::WeightZeroCycle));
        let mut q = Quiver::new();
        q.add_vertex("1").unwrap();
        q.add_arrow("l", 0, 0, Bidegree::new(1, 0)).unwrap();
        let all = enumerate_all_paths(&q, 3).unwrap();
        assert_eq!(all.values().map(Vec::len).sum::<usize>(), 4);
    }
}
