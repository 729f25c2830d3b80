//! Weight-truncated quotients of bigraded path algebras, computed block by
//! block: in each (source, target, weight, degree) block the ideal is the span
//! of all `p·r·q`, and the normal-form basis is the set of non-pivot paths.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{format_rational, Echelon, Rational, SparseAccumulator, SparseVec};
use crate::quiver::{enumerate_all_paths, Bidegree, BlockKey, Path, Quiver};

/// A finite rational combination of paths.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathVector {
    terms: BTreeMap<Path, Rational>,
}

impl PathVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_path(p: Path) -> Self {
        let mut v = Self::new();
        v.add_term(p, Rational::one());
        v
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Path, Rational)>) -> Self {
        let mut v = Self::new();
        for (p, c) in terms {
            v.add_term(p, c);
        }
        v
    }

    pub fn add_term(&mut self, p: Path, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(p.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Path, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &Path) -> Rational {
        self.terms.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(p, x)| (p.clone(), x * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut v = self.clone();
        for (p, c) in &other.terms {
            v.add_term(p.clone(), c.clone());
        }
        v
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(&-Rational::one()))
    }

    /// Product in the free path algebra: concatenation, zero when not composable.
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = Self::new();
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                if let Some(pq) = p.concat(q) {
                    v.add_term(pq, a * b);
                }
            }
        }
        v
    }

    /// The common bidegree of all terms; `None` for the zero vector, error if mixed.
    pub fn bidegree(&self, q: &Quiver) -> Result<Option<Bidegree>> {
        let mut out = None;
        for p in self.terms.keys() {
            let b = p.bidegree(q);
            match out {
                None => out = Some(b),
                Some(o) if o != b => return Err(Error::InhomogeneousRelator(self.label(q))),
                _ => {}
            }
        }
        Ok(out)
    }

    /// Splits by (source, target, bidegree).
    pub fn components(&self, q: &Quiver) -> BTreeMap<BlockKey, PathVector> {
        let mut out: BTreeMap<BlockKey, PathVector> = BTreeMap::new();
        for (p, c) in &self.terms {
            let b = p.bidegree(q);
            out.entry(BlockKey::new(p.source, p.target, b.weight, b.degree))
                .or_default()
                .add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn label(&self, q: &Quiver) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (p, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push_str(" + ");
            }
            s.push_str(&alloc::format!("({})*{}", format_rational(c), p.label(q)));
        }
        s
    }
}

/// A homogeneous element: coordinates in the normal-form basis of one block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub key: BlockKey,
    pub coords: SparseVec,
}

impl Element {
    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct Block {
    key: BlockKey,
    paths: Vec<Path>,
    index: BTreeMap<Path, usize>,
    ideal: Echelon,
    basis: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl Block {
    fn new(key: BlockKey, paths: Vec<Path>) -> Self {
        let index = paths.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let n = paths.len();
        Self { key, paths, index, ideal: Echelon::new(n), basis: (0..n).collect(), position: (0..n).map(Some).collect() }
    }

    fn finish(&mut self) {
        self.basis = (0..self.paths.len()).filter(|&i| !self.ideal.is_pivot(i)).collect();
        self.position = vec![None; self.paths.len()];
        for (k, &i) in self.basis.iter().enumerate() {
            self.position[i] = Some(k);
        }
    }

    pub fn key(&self) -> BlockKey {
        self.key
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn basis_path(&self, k: usize) -> &Path {
        &self.paths[self.basis[k]]
    }

    pub fn basis_paths(&self) -> impl Iterator<Item = &Path> {
        self.basis.iter().map(|&i| &self.paths[i])
    }

    pub fn path_index(&self, p: &Path) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn ideal_rank(&self) -> usize {
        self.ideal.rank()
    }

    /// Normal-form coordinates of a vector given in path coordinates.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let rem = if self.ideal.rank() == 0 { v.clone() } else { self.ideal.reduce(v).remainder };
        rem.map_indices(|i| self.position[i].expect("remainder lies on non-pivot paths"))
    }

    pub fn reduce_path(&self, i: usize) -> SparseVec {
        match self.position[i] {
            Some(k) => SparseVec::unit(k),
            None => self.reduce(&SparseVec::unit(i)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HilbertSeries {
    pub dims: BTreeMap<(u32, i32), usize>,
}

impl HilbertSeries {
    pub fn from_blocks<'a>(blocks: impl IntoIterator<Item = (&'a BlockKey, usize)>) -> Self {
        let mut dims: BTreeMap<(u32, i32), usize> = BTreeMap::new();
        for (k, d) in blocks {
            if d > 0 {
                *dims.entry((k.weight, k.degree)).or_default() += d;
            }
        }
        Self { dims }
    }

    pub fn get(&self, weight: u32, degree: i32) -> usize {
        self.dims.get(&(weight, degree)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }
}

#[derive(Clone, Debug)]
pub struct GradedQuotientAlgebra {
    quiver: Quiver,
    relators: Vec<PathVector>,
    max_weight: u32,
    blocks: BTreeMap<BlockKey, Block>,
}

pub fn build_quotient(q: &Quiver, relators: &[PathVector], max_weight: u32) -> Result<GradedQuotientAlgebra> {
    let all = enumerate_all_paths(q, max_weight)?;
    let mut components: Vec<(BlockKey, PathVector)> = Vec::new();
    for r in relators {
        r.bidegree(q)?;
        components.extend(r.components(q));
    }
    let mut by_endpoints: BTreeMap<(usize, usize), Vec<BlockKey>> = BTreeMap::new();
    for k in all.keys() {
        by_endpoints.entry((k.source, k.target)).or_default().push(*k);
    }
    let keys: Vec<BlockKey> = all.keys().copied().collect();
    let built = crate::par_map(&keys, |key| {
        let mut block = Block::new(*key, all[key].clone());
        for (rk, r) in &components {
            if rk.weight > key.weight {
                continue;
            }
            let Some(lefts) = by_endpoints.get(&(key.source, rk.source)) else { continue };
            for lk in lefts {
                if lk.weight + rk.weight > key.weight {
                    continue;
                }
                let right_key = BlockKey::new(
                    rk.target,
                    key.target,
                    key.weight - rk.weight - lk.weight,
                    key.degree - rk.degree - lk.degree,
                );
                let Some(rights) = all.get(&right_key) else { continue };
                for p in &all[lk] {
                    for s in rights {
                        let mut acc = SparseAccumulator::new();
                        for (m, c) in r.iter() {
                            let Some(pm) = p.concat(m) else { continue };
                            let Some(pms) = pm.concat(s) else { continue };
                            let i = block.path_index(&pms).expect("product lies in the block");
                            acc.add_term(i, c.clone());
                        }
                        let row = acc.finish();
                        if !row.is_zero() && block.ideal.rank() < block.paths.len() {
                            block.ideal.insert(&row);
                        }
                    }
                }
            }
        }
        block.finish();
        block
    });
    let blocks = keys.into_iter().zip(built).collect();
    Ok(GradedQuotientAlgebra { quiver: q.clone(), relators: relators.to_vec(), max_weight, blocks })
}

impl GradedQuotientAlgebra {
    pub fn free(q: &Quiver, max_weight: u32) -> Result<Self> {
        build_quotient(q, &[], max_weight)
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn relators(&self) -> &[PathVector] {
        &self.relators
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn blocks(&self) -> &BTreeMap<BlockKey, Block> {
        &self.blocks
    }

    pub fn block(&self, key: &BlockKey) -> Option<&Block> {
        self.blocks.get(key)
    }

    pub fn dim(&self, key: &BlockKey) -> usize {
        self.blocks.get(key).map_or(0, Block::dim)
    }

    pub fn hilbert_series(&self) -> HilbertSeries {
        HilbertSeries::from_blocks(self.blocks.iter().map(|(k, b)| (k, b.dim())))
    }

    pub fn block_dims(&self) -> BTreeMap<BlockKey, usize> {
        self.blocks.iter().filter(|(_, b)| b.dim() > 0).map(|(k, b)| (*k, b.dim())).collect()
    }

    pub fn basis_label(&self, key: &BlockKey, k: usize) -> String {
        self.blocks[key].basis_path(k).label(&self.quiver)
    }

    fn check_weight(&self, w: u32) -> Result<()> {
        if w > self.max_weight {
            return Err(Error::TruncationOverflow { weight: w, max_weight: self.max_weight });
        }
        Ok(())
    }

    pub fn element_of_path(&self, p: &Path) -> Result<Element> {
        let b = p.bidegree(&self.quiver);
        self.check_weight(b.weight)?;
        let key = BlockKey::new(p.source, p.target, b.weight, b.degree);
        let block = self.blocks.get(&key).ok_or_else(|| Error::Inconsistent("path outside enumerated blocks".into()))?;
        let i = block.path_index(p).ok_or_else(|| Error::Inconsistent("path missing from its block".into()))?;
        Ok(Element { key, coords: block.reduce_path(i) })
    }

    /// Normal forms of every homogeneous component.
    pub fn reduce(&self, v: &PathVector) -> Result<BTreeMap<BlockKey, SparseVec>> {
        let mut out: BTreeMap<BlockKey, SparseAccumulator> = BTreeMap::new();
        for (p, c) in v.iter() {
            let e = self.element_of_path(p)?;
            out.entry(e.key).or_default().add_scaled(c, &e.coords);
        }
        Ok(out.into_iter().map(|(k, a)| (k, a.finish())).filter(|(_, v)| !v.is_zero()).collect())
    }

    pub fn to_path_vector(&self, e: &Element) -> PathVector {
        let block = &self.blocks[&e.key];
        PathVector::from_terms(e.coords.iter().map(|(k, c)| (block.basis_path(k).clone(), c.clone())))
    }

    pub fn reduce_to_path_vector(&self, v: &PathVector) -> Result<PathVector> {
        let mut out = PathVector::new();
        for (key, coords) in self.reduce(v)? {
            out = out.add(&self.to_path_vector(&Element { key, coords }));
        }
        Ok(out)
    }

    /// Product of basis element `i` of block `a` and basis element `j` of block `b`.
    pub fn basis_product(&self, a: &BlockKey, i: usize, b: &BlockKey, j: usize) -> Result<Option<Element>> {
        let Some(key) = a.compose(b) else { return Ok(None) };
        self.check_weight(key.weight)?;
        let p = self.blocks[a].basis_path(i).concat(self.blocks[b].basis_path(j)).expect("composable");
        let block = &self.blocks[&key];
        let idx = block.path_index(&p).expect("product path enumerated");
        Ok(Some(Element { key, coords: block.reduce_path(idx) }))
    }

    /// `None` when the endpoints do not match.
    pub fn multiply_elements(&self, x: &Element, y: &Element) -> Result<Option<Element>> {
        let Some(key) = x.key.compose(&y.key) else { return Ok(None) };
        self.check_weight(key.weight)?;
        let mut acc = SparseAccumulator::new();
        for (i, a) in x.coords.iter() {
            for (j, b) in y.coords.iter() {
                let e = self.basis_product(&x.key, i, &y.key, j)?.expect("composable");
                acc.add_scaled(&(a * b), &e.coords);
            }
        }
        Ok(Some(Element { key, coords: acc.finish() }))
    }

    pub fn multiply(&self, x: &PathVector, y: &PathVector) -> Result<PathVector> {
        let mut out = PathVector::new();
        for (p, a) in x.iter() {
            for (q, b) in y.iter() {
                if let Some(pq) = p.concat(q) {
                    self.check_weight(pq.bidegree(&self.quiver).weight)?;
                    out.add_term(pq, a * b);
                }
            }
        }
        self.reduce_to_path_vector(&out)
    }
}

/// The doubled quiver: original arrows first, then one reversed arrow `a*` of
/// bidegree (1, 0) for each, in the same order.
pub fn double_quiver(q: &Quiver) -> Result<Quiver> {
    let mut d = Quiver::new();
    for v in 0..q.vertex_count() {
        d.add_vertex(q.vertex_label(v))?;
    }
    for a in q.arrows() {
        d.add_arrow(&a.label, a.source, a.target, Bidegree::ZERO)?;
    }
    for a in q.arrows() {
        d.add_arrow(&alloc::format!("{}*", a.label), a.target, a.source, Bidegree::new(1, 0))?;
    }
    Ok(d)
}

/// `ρ_i` in a quiver containing `q`'s arrows at indices `0..m` and their
/// reverses at `m..2m`: outgoing arrows contribute `a then a*`, incoming
/// arrows contribute `-(b* then b)`.
pub fn preprojective_relator(q: &Quiver, i: usize, ambient: &Quiver) -> PathVector {
    let m = q.arrow_count();
    let mut r = PathVector::new();
    for (a, arrow) in q.arrows().iter().enumerate() {
        if arrow.source == i {
            r.add_term(Path::from_arrows(ambient, &[a, a + m]).expect("loop"), Rational::one());
        }
        if arrow.target == i {
            r.add_term(Path::from_arrows(ambient, &[a + m, a]).expect("loop"), -Rational::one());
        }
    }
    r
}

pub fn preprojective(q: &Quiver, max_weight: u32) -> Result<GradedQuotientAlgebra> {
    if !q.is_acyclic() {
        return Err(Error::NotAcyclic);
    }
    let d = double_quiver(q)?;
    let relators: Vec<PathVector> = (0..q.vertex_count()).map(|i| preprojective_relator(q, i, &d)).collect();
    build_quotient(&d, &relators, max_weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn a2() -> Quiver {
        Quiver::from_edges(&["1", "2"], &[("a", "2", "1")]).unwrap()
    }

    fn kronecker() -> Quiver {
        Quiver::from_edges(&["1", "2"], &[("a", "1", "2"), ("b", "1", "2")]).unwrap()
    }

    #[test]
    fn free_a2_hilbert() {
        let alg = GradedQuotientAlgebra::free(&a2(), 3).unwrap();
        assert_eq!(alg.hilbert_series().get(0, 0), 3);
        assert_eq!(alg.dim(&BlockKey::new(1, 0, 0, 0)), 1);
    }

    #[test]
    fn monomial_ideal_removes_paths() {
        let q = a2();
        let alg = build_quotient(&q, &[PathVector::from_path(Path::arrow(&q, 0))], 2).unwrap();
        assert_eq!(alg.dim(&BlockKey::new(1, 0, 0, 0)), 0);
        assert_eq!(alg.hilbert_series().get(0, 0), 2);
    }

    #[test]
    fn preprojective_a2_loop_killed() {
        let lam = preprojective(&a2(), 4).unwrap();
        assert_eq!(lam.dim(&BlockKey::new(0, 0, 1, 0)), 0);
        assert_eq!(lam.dim(&BlockKey::new(1, 1, 1, 0)), 0);
        assert_eq!(lam.hilbert_series().total(), 4);
    }

    #[test]
    fn idempotents() {
        let lam = preprojective(&a2(), 2).unwrap();
        let e1 = PathVector::from_path(Path::trivial(0));
        let e2 = PathVector::from_path(Path::trivial(1));
        assert_eq!(lam.multiply(&e1, &e1).unwrap(), e1);
        assert!(lam.multiply(&e1, &e2).unwrap().is_zero());
    }

    #[test]
    fn truncation_overflow() {
        let lam = preprojective(&kronecker(), 1).unwrap();
        let d = lam.quiver();
        let astar = PathVector::from_path(Path::arrow(d, 2));
        let a = PathVector::from_path(Path::arrow(d, 0));
        let loop2 = lam.multiply(&astar, &a).unwrap();
        assert!(matches!(lam.multiply(&loop2, &astar), Err(Error::TruncationOverflow { .. })));
    }

    #[test]
    fn relator_absorbed() {
        let q = kronecker();
        let lam = preprojective(&q, 3).unwrap();
        let d = lam.quiver();
        let rho = preprojective_relator(&q, 0, d);
        assert!(lam.reduce_to_path_vector(&rho).unwrap().is_zero());
        let bstar = PathVector::from_path(Path::arrow(d, 3));
        assert!(lam.multiply(&bstar, &rho).unwrap().is_zero());
        assert!(lam.multiply(&rho.scaled(&rat(3)), &PathVector::from_path(Path::arrow(d, 1))).unwrap().is_zero());
    }
}
