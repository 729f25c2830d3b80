//! The Ginzburg dg quiver of an acyclic quiver and weight-truncated dg path
//! algebras stored block by block.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::One;

use crate::algebra::{build_quotient, preprojective_relator, Element, GradedQuotientAlgebra, PathVector};
use crate::error::{Error, Result};
use crate::linalg::{Rational, SparseAccumulator, SparseVec};
use crate::quiver::{Bidegree, BlockKey, Path, Quiver};

/// Arrows of the Ginzburg quiver are laid out as: the `m` original arrows,
/// then their reverses `a*`, then one loop `t_i` per vertex.
#[derive(Clone, Debug)]
pub struct GinzburgQuiver {
    original: Quiver,
    quiver: Quiver,
    differential: Vec<PathVector>,
}

pub fn build_ginzburg(q: &Quiver) -> Result<GinzburgQuiver> {
    if !q.is_acyclic() {
        return Err(Error::NotAcyclic);
    }
    let m = q.arrow_count();
    let mut g = Quiver::new();
    for v in 0..q.vertex_count() {
        g.add_vertex(q.vertex_label(v))?;
    }
    for a in q.arrows() {
        g.add_arrow(&a.label, a.source, a.target, Bidegree::ZERO)?;
    }
    for a in q.arrows() {
        g.add_arrow(&format!("{}*", a.label), a.target, a.source, Bidegree::new(1, 0))?;
    }
    for v in 0..q.vertex_count() {
        g.add_arrow(&format!("t{}", q.vertex_label(v)), v, v, Bidegree::new(1, 1))?;
    }
    let mut differential = alloc::vec![PathVector::new(); 2 * m];
    for v in 0..q.vertex_count() {
        differential.push(preprojective_relator(q, v, &g));
    }
    Ok(GinzburgQuiver { original: q.clone(), quiver: g, differential })
}

impl GinzburgQuiver {
    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn original(&self) -> &Quiver {
        &self.original
    }

    pub fn differential(&self) -> &[PathVector] {
        &self.differential
    }

    pub fn star(&self, a: usize) -> usize {
        a + self.original.arrow_count()
    }

    pub fn loop_arrow(&self, v: usize) -> usize {
        2 * self.original.arrow_count() + v
    }

    pub fn rho(&self, v: usize) -> &PathVector {
        &self.differential[self.loop_arrow(v)]
    }
}

/// Leibniz extension of an arrow differential to one path.
pub fn leibniz_on_path(q: &Quiver, arrow_d: &[PathVector], p: &Path) -> PathVector {
    let mut out = PathVector::new();
    let mut sign_degree = 0i32;
    for (k, &a) in p.arrows.iter().enumerate() {
        let da = &arrow_d[a];
        if !da.is_zero() {
            let sign = if sign_degree.rem_euclid(2) == 0 { Rational::one() } else { -Rational::one() };
            for (m, c) in da.iter() {
                let mut arrows = p.arrows[..k].to_vec();
                arrows.extend_from_slice(&m.arrows);
                arrows.extend_from_slice(&p.arrows[k + 1..]);
                let path = Path { source: p.source, target: p.target, arrows };
                out.add_term(path, c * &sign);
            }
        }
        sign_degree += q.arrow(a).bidegree.degree;
    }
    out
}

/// A weight-truncated bigraded dg algebra: a block quotient algebra with a
/// differential of bidegree (0, -1) given on arrows and extended by Leibniz.
#[derive(Clone, Debug)]
pub struct BlockComplex {
    algebra: GradedQuotientAlgebra,
    arrow_differential: Vec<PathVector>,
    differential: BTreeMap<BlockKey, Vec<SparseVec>>,
}

impl BlockComplex {
    pub fn new(algebra: GradedQuotientAlgebra, arrow_differential: Vec<PathVector>) -> Result<Self> {
        let q = algebra.quiver().clone();
        for (a, da) in arrow_differential.iter().enumerate() {
            if let Some(b) = da.bidegree(&q)? {
                let ab = q.arrow(a).bidegree;
                if b.weight != ab.weight || b.degree != ab.degree - 1 {
                    return Err(Error::InvalidArgument(format!("d({}) is not of bidegree (0,-1)", q.arrow(a).label)));
                }
            }
        }
        let keys: Vec<BlockKey> = algebra.blocks().keys().copied().collect();
        let columns = crate::par_map(&keys, |key| -> Result<Vec<SparseVec>> {
            let block = &algebra.blocks()[key];
            let target = key.with_degree(key.degree - 1);
            block
                .basis_paths()
                .map(|p| {
                    let dp = leibniz_on_path(&q, &arrow_differential, p);
                    let mut red = algebra.reduce(&dp)?;
                    let v = red.remove(&target).unwrap_or_default();
                    if !red.is_empty() {
                        return Err(Error::Inconsistent("differential left its block".into()));
                    }
                    Ok(v)
                })
                .collect()
        });
        let mut differential = BTreeMap::new();
        for (k, c) in keys.into_iter().zip(columns) {
            differential.insert(k, c?);
        }
        Ok(Self { algebra, arrow_differential, differential })
    }

    pub fn algebra(&self) -> &GradedQuotientAlgebra {
        &self.algebra
    }

    pub fn quiver(&self) -> &Quiver {
        self.algebra.quiver()
    }

    pub fn max_weight(&self) -> u32 {
        self.algebra.max_weight()
    }

    pub fn arrow_differential(&self) -> &[PathVector] {
        &self.arrow_differential
    }

    pub fn dim(&self, key: &BlockKey) -> usize {
        self.algebra.dim(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &BlockKey> {
        self.differential.keys()
    }

    /// Column `i` of the differential out of `key`, in the block one degree lower.
    pub fn d_basis(&self, key: &BlockKey, i: usize) -> &SparseVec {
        &self.differential[key][i]
    }

    pub fn apply_d(&self, key: &BlockKey, v: &SparseVec) -> SparseVec {
        let Some(cols) = self.differential.get(key) else { return SparseVec::new() };
        let mut acc = SparseAccumulator::new();
        for (i, c) in v.iter() {
            acc.add_scaled(c, &cols[i]);
        }
        acc.finish()
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Option<Element>> {
        self.algebra.multiply_elements(x, y)
    }

    pub fn verify_d_squared(&self) -> Result<()> {
        for (key, cols) in &self.differential {
            let lower = key.with_degree(key.degree - 1);
            for (i, col) in cols.iter().enumerate() {
                if !self.apply_d(&lower, col).is_zero() {
                    return Err(Error::Inconsistent(format!(
                        "d^2 != 0 on {}",
                        self.algebra.basis_label(key, i)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks `d(xy) = d(x) y + (-1)^{|x|} x d(y)` for every arrow `x` and every
    /// composable basis element `y`. The algebra is generated by arrows, so by
    /// induction on path length this gives the rule for all pairs.
    pub fn verify_leibniz(&self) -> Result<()> {
        let q = self.quiver().clone();
        let arrows: Vec<usize> = (0..q.arrow_count()).filter(|&a| q.arrow(a).bidegree.weight <= self.max_weight()).collect();
        let keys: Vec<BlockKey> = self.differential.keys().copied().collect();
        let results = crate::par_map(&arrows, |&a| -> Result<()> {
            let x = self.algebra.element_of_path(&Path::arrow(&q, a))?;
            let ka = x.key;
            let dx = Element { key: ka.with_degree(ka.degree - 1), coords: self.apply_d(&ka, &x.coords) };
            let sign = if ka.degree.rem_euclid(2) == 0 { Rational::one() } else { -Rational::one() };
            for kb in &keys {
                let Some(kab) = ka.compose(kb) else { continue };
                if kab.weight > self.max_weight() {
                    continue;
                }
                for j in 0..self.dim(kb) {
                    let y = Element { key: *kb, coords: SparseVec::unit(j) };
                    let dy = Element { key: kb.with_degree(kb.degree - 1), coords: self.d_basis(kb, j).clone() };
                    let xy = self.multiply(&x, &y)?.expect("composable");
                    let lhs = self.apply_d(&kab, &xy.coords);
                    let mut rhs = SparseAccumulator::new();
                    if !dx.is_zero() {
                        rhs.add_scaled(&Rational::one(), &self.multiply(&dx, &y)?.expect("composable").coords);
                    }
                    if !dy.is_zero() {
                        rhs.add_scaled(&sign, &self.multiply(&x, &dy)?.expect("composable").coords);
                    }
                    if lhs != rhs.finish() {
                        return Err(Error::Inconsistent(format!(
                            "Leibniz fails on {} * {}",
                            q.arrow(a).label,
                            self.algebra.basis_label(kb, j)
                        )));
                    }
                }
            }
            Ok(())
        });
        results.into_iter().collect()
    }
}

/// The free dg path algebra on the Ginzburg quiver up to `max_weight`,
/// validated for `d² = 0` and the Leibniz rule.
pub fn truncate_dg(gq: &GinzburgQuiver, max_weight: u32) -> Result<BlockComplex> {
    let algebra = build_quotient(gq.quiver(), &[], max_weight)?;
    let c = BlockComplex::new(algebra, gq.differential.clone())?;
    c.verify_d_squared()?;
    c.verify_leibniz()?;
    Ok(c)
}

impl BlockComplex {
    /// Number of nonzero differential entries, a cheap size statistic.
    pub fn differential_nnz(&self) -> usize {
        self.differential.values().flat_map(|c| c.iter().map(SparseVec::len)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use crate::quiver::enumerate_all_paths;

    fn a2() -> Quiver {
        Quiver::from_edges(&["1", "2"], &[("a", "2", "1")]).unwrap()
    }

    #[test]
    fn a2_ginzburg_shape() {
        let g = build_ginzburg(&a2()).unwrap();
        assert_eq!(g.quiver().arrow_count(), 4);
        let q = g.quiver();
        let loop2 = Path::from_arrows(q, &[0, 1]).unwrap();
        let loop1 = Path::from_arrows(q, &[1, 0]).unwrap();
        assert_eq!(*g.rho(1), PathVector::from_path(loop2));
        assert_eq!(*g.rho(0), PathVector::from_terms([(loop1, rat(-1))]));
    }

    #[test]
    fn kronecker_rho() {
        let k = Quiver::from_edges(&["1", "2"], &[("a", "1", "2"), ("b", "1", "2")]).unwrap();
        let g = build_ginzburg(&k).unwrap();
        let q = g.quiver();
        let p = |a: &[usize]| Path::from_arrows(q, a).unwrap();
        let rho1 = PathVector::from_terms([(p(&[0, 2]), rat(1)), (p(&[1, 3]), rat(1))]);
        let rho2 = PathVector::from_terms([(p(&[2, 0]), rat(-1)), (p(&[3, 1]), rat(-1))]);
        assert_eq!(*g.rho(0), rho1);
        assert_eq!(*g.rho(1), rho2);
        for v in 0..2 {
            let mut d_rho = PathVector::new();
            for (path, c) in g.rho(v).iter() {
                d_rho = d_rho.add(&leibniz_on_path(q, g.differential(), path).scaled(c));
            }
            assert!(d_rho.is_zero());
        }
    }

    #[test]
    fn loop_rejected() {
        let mut l = Quiver::new();
        l.add_vertex("1").unwrap();
        l.add_arrow("l", 0, 0, Bidegree::ZERO).unwrap();
        assert_eq!(build_ginzburg(&l).unwrap_err(), Error::NotAcyclic);
    }

    #[test]
    fn a2_truncation_reads_off_definition() {
        let g = build_ginzburg(&a2()).unwrap();
        let c = truncate_dg(&g, 2).unwrap();
        let key = BlockKey::new(0, 0, 1, 1);
        assert_eq!(c.dim(&key), 1);
        assert_eq!(c.algebra().basis_label(&key, 0), "t1");
        let low = key.with_degree(0);
        let block = c.algebra().block(&low).unwrap();
        let i = block.path_index(&Path::from_arrows(g.quiver(), &[1, 0]).unwrap()).unwrap();
        assert_eq!(*c.d_basis(&key, 0), SparseVec::from_entries(alloc::vec![(i, rat(-1))]));
        let key2 = BlockKey::new(1, 1, 1, 1);
        let low2 = c.algebra().block(&key2.with_degree(0)).unwrap();
        let j = low2.path_index(&Path::from_arrows(g.quiver(), &[0, 1]).unwrap()).unwrap();
        assert_eq!(c.d_basis(&key2, 0).get(j), rat(1));
    }

    #[test]
    fn block_dims_match_enumeration() {
        let g = build_ginzburg(&a2()).unwrap();
        let c = truncate_dg(&g, 3).unwrap();
        let all = enumerate_all_paths(g.quiver(), 3).unwrap();
        for (k, paths) in &all {
            assert_eq!(c.dim(k), paths.len());
            assert!(k.degree <= k.weight as i32);
        }
    }

    #[test]
    fn enumerate_a2_ginzburg_loops_at_1() {
        let g = build_ginzburg(&a2()).unwrap();
        let paths = crate::quiver::enumerate_paths(g.quiver(), 0, 0, 1).unwrap();
        let labels: alloc::vec::Vec<_> = paths.iter().map(|p| p.label(g.quiver())).collect();
        assert_eq!(labels, ["e1", "t1", "a*.a"]);
    }
}
