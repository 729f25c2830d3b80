//! Homology of block complexes as a deformation retract, and transfer of the
//! product to an A∞-structure on homology.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ginzburg::BlockComplex;
use crate::linalg::{Echelon, Inserted, Rational, RationalMatrix, SparseAccumulator, SparseVec};
use crate::quiver::BlockKey;

mod gauge;
mod homotopy;
mod relations;
mod trees;

pub use gauge::{apply_gauge, kill_arity, Gauge};
pub(crate) use homotopy::composable_tuples;
pub use homotopy::{evaluate_mu_tree, mu_by_trees, transfer, transfer_with, AInfinityTable, HomologyBasis};
pub use relations::{check_ainf_relations, relation_residual, AInfinityStructure, DgStructure, RelationReport, Violation};
pub use trees::{enumerate_pbr, permutation_sign, sigma_permutation, tree_sign, PbrTree};

/// Homotopy retraction data `(j, q, φ)` between a block complex and its homology.
///
/// `j` and `q` preserve the block; `φ` raises the degree by one. Homology
/// coordinates refer to the basis `0..homology_dim(key)` of each block.
pub trait Contraction: Sync {
    fn homology_dim(&self, key: &BlockKey) -> usize;
    fn include(&self, c: &BlockComplex, key: &BlockKey, h: &SparseVec) -> SparseVec;
    fn project(&self, c: &BlockComplex, key: &BlockKey, x: &SparseVec) -> SparseVec;
    fn homotopy(&self, c: &BlockComplex, key: &BlockKey, x: &SparseVec) -> SparseVec;
}

#[derive(Clone, Debug)]
struct BlockRetraction {
    /// Boundaries inside this block, each tagged with a preimage one degree up.
    boundaries: Echelon,
    /// Fully reduced homology representatives, vanishing on boundary pivots.
    homology: Echelon,
}

/// Chains split as `C = B ⊕ H ⊕ W`: boundaries, the span of the homology
/// representatives, and the span of the recorded preimages of boundaries.
/// Then `j` includes `H`, `q` projects onto it, and `φ` sends the `B`
/// component to its preimage in `W` and kills `H ⊕ W`. All side conditions
/// hold by construction.
#[derive(Clone, Debug)]
pub struct Retraction {
    blocks: BTreeMap<BlockKey, BlockRetraction>,
}

pub fn homology_and_retraction(c: &BlockComplex) -> Result<Retraction> {
    let keys: Vec<BlockKey> = c.keys().copied().collect();
    // Reducing the differential out of block K gives the boundaries of K - 1 and the cycles of K.
    let reduced = crate::par_map(&keys, |key| {
        let lower = key.with_degree(key.degree - 1);
        let mut image = Echelon::new(c.dim(&lower));
        let mut cycles = Vec::new();
        for i in 0..c.dim(key) {
            match image.insert_tagged(c.d_basis(key, i), SparseVec::unit(i)) {
                Inserted::Dependent(z) => cycles.push(z),
                Inserted::Pivot(_) => {}
            }
        }
        (lower, image, cycles)
    });
    let mut boundaries: BTreeMap<BlockKey, Echelon> = BTreeMap::new();
    let mut cycles: BTreeMap<BlockKey, Vec<SparseVec>> = BTreeMap::new();
    for (key, (lower, image, z)) in keys.iter().zip(reduced) {
        if c.dim(&lower) > 0 {
            boundaries.insert(lower, image);
        }
        cycles.insert(*key, z);
    }
    let built = crate::par_map(&keys, |key| {
        let b = boundaries.get(key).cloned().unwrap_or_else(|| Echelon::new(c.dim(key)));
        let mut reps = Echelon::new(c.dim(key));
        for z in &cycles[key] {
            let rem = b.reduce(z).remainder;
            if !rem.is_zero() {
                reps.insert(&rem);
            }
        }
        BlockRetraction { boundaries: b, homology: fully_reduce(reps) }
    });
    Ok(Retraction { blocks: keys.into_iter().zip(built).collect() })
}

/// Back-substitution so that every row vanishes on the other rows' pivots.
fn fully_reduce(e: Echelon) -> Echelon {
    let mut rows: Vec<(usize, SparseVec)> = e.pivots().iter().copied().zip(e.rows().iter().cloned()).collect();
    rows.sort_by_key(|r| r.0);
    for i in (0..rows.len()).rev() {
        for k in i + 1..rows.len() {
            let (p, below) = (rows[k].0, rows[k].1.clone());
            let c = rows[i].1.get(p);
            if !c.is_zero() {
                rows[i].1 = rows[i].1.add_scaled(&-c, &below);
            }
        }
    }
    let mut out = Echelon::new(e.dim());
    for (_, r) in rows {
        out.insert(&r);
    }
    out
}

impl Retraction {
    pub fn keys(&self) -> impl Iterator<Item = &BlockKey> {
        self.blocks.keys()
    }

    /// Representative cycle of homology basis element `k`.
    pub fn representative(&self, key: &BlockKey, k: usize) -> &SparseVec {
        &self.blocks[key].homology.rows()[k]
    }

    pub fn homology_dims(&self) -> BTreeMap<BlockKey, usize> {
        self.blocks.iter().filter(|(_, b)| b.homology.rank() > 0).map(|(k, b)| (*k, b.homology.rank())).collect()
    }

    /// The `W` component of `x`, found by lifting `d x` through the recorded preimages.
    fn w_part(&self, c: &BlockComplex, key: &BlockKey, x: &SparseVec) -> SparseVec {
        let dx = c.apply_d(key, x);
        if dx.is_zero() {
            return SparseVec::new();
        }
        let lower = key.with_degree(key.degree - 1);
        let b = &self.blocks[&lower].boundaries;
        let red = b.reduce(&dx);
        debug_assert!(red.remainder.is_zero(), "d x is a boundary");
        let mut acc = SparseAccumulator::new();
        for (row, coef) in &red.coefficients {
            acc.add_scaled(coef, b.tag(*row));
        }
        acc.finish()
    }
}

impl Contraction for Retraction {
    fn homology_dim(&self, key: &BlockKey) -> usize {
        self.blocks.get(key).map_or(0, |b| b.homology.rank())
    }

    fn include(&self, _c: &BlockComplex, key: &BlockKey, h: &SparseVec) -> SparseVec {
        let Some(block) = self.blocks.get(key) else { return SparseVec::new() };
        let mut acc = SparseAccumulator::new();
        let rows = block.homology.rows();
        for (k, coef) in h.iter() {
            acc.add_scaled(coef, &rows[k]);
        }
        acc.finish()
    }

    fn project(&self, c: &BlockComplex, key: &BlockKey, x: &SparseVec) -> SparseVec {
        let Some(block) = self.blocks.get(key) else { return SparseVec::new() };
        if block.homology.rank() == 0 || x.is_zero() {
            return SparseVec::new();
        }
        let z = x.sub(&self.w_part(c, key, x));
        let rem = block.boundaries.reduce(&z).remainder;
        let red = block.homology.reduce(&rem);
        debug_assert!(red.remainder.is_zero(), "cycle modulo boundaries lies in the homology span");
        SparseVec::from_entries(red.coefficients)
    }

    fn homotopy(&self, c: &BlockComplex, key: &BlockKey, x: &SparseVec) -> SparseVec {
        let Some(block) = self.blocks.get(key) else { return SparseVec::new() };
        if block.boundaries.rank() == 0 || x.is_zero() {
            return SparseVec::new();
        }
        let z = x.sub(&self.w_part(c, key, x));
        let red = block.boundaries.reduce(&z);
        let mut acc = SparseAccumulator::new();
        for (row, coef) in &red.coefficients {
            acc.add_scaled(coef, block.boundaries.tag(*row));
        }
        acc.finish()
    }
}

/// Checks `qj = 1`, `dφ + φd = 1 - jq`, `φj = 0`, `qφ = 0` and `φφ = 0` on every basis vector.
pub fn verify_contraction(c: &BlockComplex, r: &dyn Contraction) -> Result<()> {
    let keys: Vec<BlockKey> = c.keys().copied().collect();
    let results = crate::par_map(&keys, |key| -> Result<()> {
        let up = key.with_degree(key.degree + 1);
        let down = key.with_degree(key.degree - 1);
        let fail = |what: &str, i: usize| {
            Err(Error::Inconsistent(format!("{what} fails on {} basis element {i}", block_name(key))))
        };
        for k in 0..r.homology_dim(key) {
            let h = SparseVec::unit(k);
            let jh = r.include(c, key, &h);
            if !c.apply_d(key, &jh).is_zero() {
                return fail("j lands in cycles", k);
            }
            if r.project(c, key, &jh) != h {
                return fail("qj = 1", k);
            }
            if !r.homotopy(c, key, &jh).is_zero() {
                return fail("φj = 0", k);
            }
        }
        for i in 0..c.dim(key) {
            let x = SparseVec::unit(i);
            let phix = r.homotopy(c, key, &x);
            let lhs = c.apply_d(&up, &phix).add(&r.homotopy(c, &down, &c.apply_d(key, &x)));
            let rhs = x.sub(&r.include(c, key, &r.project(c, key, &x)));
            if lhs != rhs {
                return fail("dφ + φd = 1 - jq", i);
            }
            if !r.project(c, &up, &phix).is_zero() {
                return fail("qφ = 0", i);
            }
            if !r.homotopy(c, &up, &phix).is_zero() {
                return fail("φφ = 0", i);
            }
        }
        Ok(())
    });
    results.into_iter().collect()
}

pub fn block_name(key: &BlockKey) -> String {
    format!("({}->{}, w={}, d={})", key.source, key.target, key.weight, key.degree)
}

/// Dense matrices of `j`, `q` and `φ` for one block, columns indexed by the domain basis.
pub fn retraction_matrices(
    c: &BlockComplex,
    r: &dyn Contraction,
    key: &BlockKey,
) -> (RationalMatrix, RationalMatrix, RationalMatrix) {
    let n = c.dim(key);
    let h = r.homology_dim(key);
    let up = key.with_degree(key.degree + 1);
    let mut j = RationalMatrix::zeros(n, h);
    for k in 0..h {
        for (i, v) in r.include(c, key, &SparseVec::unit(k)).iter() {
            j.set(i, k, v.clone());
        }
    }
    let mut q = RationalMatrix::zeros(h, n);
    let mut phi = RationalMatrix::zeros(c.dim(&up), n);
    for i in 0..n {
        for (k, v) in r.project(c, key, &SparseVec::unit(i)).iter() {
            q.set(k, i, v.clone());
        }
        for (k, v) in r.homotopy(c, key, &SparseVec::unit(i)).iter() {
            phi.set(k, i, v.clone());
        }
    }
    (j, q, phi)
}

/// Another valid retraction of the same complex: homology representatives are
/// moved by boundaries `j' = j + d s`, the homotopy becomes `φ - s q`, and the
/// side conditions are restored by `φ ↦ (1 - j'q) φ (1 - j'q)` followed by
/// `φ ↦ φ d φ`.
pub struct Rebased<'a> {
    base: &'a Retraction,
    shift: BTreeMap<BlockKey, Vec<SparseVec>>,
}

impl<'a> Rebased<'a> {
    /// `s` sends homology basis element `k` to the chain basis element `k mod dim`
    /// one degree up (scaled by `k + 1`), whenever that block is nonzero.
    pub fn new(c: &BlockComplex, base: &'a Retraction) -> Self {
        let mut shift = BTreeMap::new();
        for key in base.keys() {
            let up = key.with_degree(key.degree + 1);
            let n = c.dim(&up);
            let h = base.homology_dim(key);
            if n == 0 || h == 0 {
                continue;
            }
            let s = (0..h).map(|k| SparseVec::unit(k % n).scaled(&Rational::from_integer((k as i64 + 1).into()))).collect();
            shift.insert(*key, s);
        }
        Self { base, shift }
    }

    fn s(&self, key: &BlockKey, h: &SparseVec) -> SparseVec {
        let Some(s) = self.shift.get(key) else { return SparseVec::new() };
        let mut acc = SparseAccumulator::new();
        for (k, coef) in h.iter() {
            acc.add_scaled(coef, &s[k]);
        }
        acc.finish()
    }

    fn one_minus_jq(&self, c: &BlockComplex, key: &BlockKey, x: &SparseVec) -> SparseVec {
        x.sub(&self.include(c, key, &self.project(c, key, x)))
    }

    fn phi0(&self, c: &BlockComplex, key: &BlockKey, x: &SparseVec) -> SparseVec {
        self.base.homotopy(c, key, x).sub(&self.s(key, &self.base.project(c, key, x)))
    }

    fn phi1(&self, c: &BlockComplex, key: &BlockKey, x: &SparseVec) -> SparseVec {
        let up = key.with_degree(key.degree + 1);
        let y = self.phi0(c, key, &self.one_minus_jq(c, key, x));
        self.one_minus_jq(c, &up, &y)
    }
}

impl Contraction for Rebased<'_> {
    fn homology_dim(&self, key: &BlockKey) -> usize {
        self.base.homology_dim(key)
    }

    fn include(&self, c: &BlockComplex, key: &BlockKey, h: &SparseVec) -> SparseVec {
        let up = key.with_degree(key.degree + 1);
        self.base.include(c, key, h).add(&c.apply_d(&up, &self.s(key, h)))
    }

    fn project(&self, c: &BlockComplex, key: &BlockKey, x: &SparseVec) -> SparseVec {
        self.base.project(c, key, x)
    }

    fn homotopy(&self, c: &BlockComplex, key: &BlockKey, x: &SparseVec) -> SparseVec {
        let up = key.with_degree(key.degree + 1);
        let y = self.phi1(c, key, x);
        if y.is_zero() {
            return y;
        }
        self.phi1(c, key, &c.apply_d(&up, &y))
    }
}

pub(crate) fn sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_quotient, preprojective};
    use crate::ginzburg::{build_ginzburg, truncate_dg};
    use crate::linalg::rat;
    use crate::quiver::{Bidegree, Path, Quiver};
    use crate::algebra::PathVector;

    fn a2() -> Quiver {
        Quiver::from_edges(&["1", "2"], &[("a", "2", "1")]).unwrap()
    }

    #[test]
    fn zero_differential_gives_identity_retraction() {
        let q = a2();
        let alg = build_quotient(&q, &[], 2).unwrap();
        let c = BlockComplex::new(alg, alloc::vec![PathVector::new()]).unwrap();
        let r = homology_and_retraction(&c).unwrap();
        verify_contraction(&c, &r).unwrap();
        for key in c.keys() {
            let (j, qm, phi) = retraction_matrices(&c, &r, key);
            assert_eq!(j, RationalMatrix::identity(c.dim(key)));
            assert_eq!(qm, RationalMatrix::identity(c.dim(key)));
            assert!(phi.is_zero());
        }
    }

    #[test]
    fn acyclic_two_term_block() {
        // One vertex, x in degree 0 and y in degree 1 with d y = 2 x.
        let mut q = Quiver::new();
        q.add_vertex("1").unwrap();
        q.add_arrow("x", 0, 0, Bidegree::new(1, 0)).unwrap();
        q.add_arrow("y", 0, 0, Bidegree::new(1, 1)).unwrap();
        let dx = PathVector::new();
        let dy = PathVector::from_terms([(Path::arrow(&q, 0), rat(2))]);
        let alg = build_quotient(&q, &[], 1).unwrap();
        let c = BlockComplex::new(alg, alloc::vec![dx, dy]).unwrap();
        let r = homology_and_retraction(&c).unwrap();
        let k0 = BlockKey::new(0, 0, 1, 0);
        let k1 = BlockKey::new(0, 0, 1, 1);
        assert_eq!(r.homology_dim(&k0), 0);
        assert_eq!(r.homology_dim(&k1), 0);
        assert_eq!(r.homotopy(&c, &k0, &SparseVec::unit(0)), SparseVec::from_entries(alloc::vec![(0, crate::linalg::ratio(1, 2))]));
    }

    #[test]
    fn a2_weight_one_homology_matches_preprojective() {
        let g = build_ginzburg(&a2()).unwrap();
        let c = truncate_dg(&g, 3).unwrap();
        let r = homology_and_retraction(&c).unwrap();
        let lam = preprojective(&a2(), 3).unwrap();
        for s in 0..2 {
            for t in 0..2 {
                let key = BlockKey::new(s, t, 1, 0);
                assert_eq!(r.homology_dim(&key), lam.dim(&key), "{key:?}");
            }
        }
        assert_eq!(r.homology_dim(&BlockKey::new(0, 0, 1, 1)), 0);
        assert_eq!(r.homology_dim(&BlockKey::new(1, 1, 1, 1)), 0);
    }

    #[test]
    fn rebased_retraction_is_valid() {
        let a3 = Quiver::from_edges(&["1", "2", "3"], &[("b", "3", "2"), ("a", "2", "1")]).unwrap();
        let g = build_ginzburg(&a3).unwrap();
        let c = truncate_dg(&g, 3).unwrap();
        let r = homology_and_retraction(&c).unwrap();
        verify_contraction(&c, &r).unwrap();
        let rb = Rebased::new(&c, &r);
        verify_contraction(&c, &rb).unwrap();
        let moved = c.keys().any(|k| {
            (0..r.homology_dim(k)).any(|i| rb.include(&c, k, &SparseVec::unit(i)) != r.include(&c, k, &SparseVec::unit(i)))
        });
        assert!(moved);
    }

    fn a3() -> Quiver {
        Quiver::from_edges(&["1", "2", "3"], &[("b", "3", "2"), ("a", "2", "1")]).unwrap()
    }

    fn table_for(q: &Quiver, w: u32, n: usize) -> (BlockComplex, Retraction, AInfinityTable) {
        let c = truncate_dg(&build_ginzburg(q).unwrap(), w).unwrap();
        let r = homology_and_retraction(&c).unwrap();
        let t = transfer(&c, &r, n).unwrap();
        (c, r, t)
    }

    #[test]
    fn dg_algebra_satisfies_relations() {
        let c = truncate_dg(&build_ginzburg(&a2()).unwrap(), 2).unwrap();
        let s = DgStructure::new(&c);
        let report = check_ainf_relations(&s, 4);
        assert!(report.is_ok(), "{:?}", report.violations.first());
        assert!(report.checked[&3] > 0);
    }

    #[test]
    fn a2_transfer_satisfies_relations() {
        let (_, _, t) = table_for(&a2(), 4, 6);
        t.check_bidegrees().unwrap();
        let report = check_ainf_relations(&t, 6);
        assert!(report.is_ok(), "{:?}", report.violations.first());
        assert!(t.count(3) > 0);
    }

    #[test]
    fn a3_transfer_satisfies_relations() {
        let (_, _, t) = table_for(&a3(), 3, 5);
        let report = check_ainf_relations(&t, 5);
        assert!(report.is_ok(), "{:?}", report.violations.first());
        assert!(t.count(3) > 0);
        for n in 4..=5 {
            assert_eq!(t.count(n), 0);
        }
    }

    #[test]
    fn memoized_transfer_matches_tree_sum() {
        let (c, r, t) = table_for(&a3(), 3, 4);
        let basis = &t.basis;
        let mut nonzero = 0;
        for first in 0..basis.len() {
            for n in 2..=4 {
                let tuples = homotopy::composable_tuples(
                    n,
                    first,
                    3,
                    &|x| basis.key(x).target,
                    &|x| basis.key(x).weight,
                    &|v| basis.starting_at(v),
                );
                for tu in tuples {
                    let direct = mu_by_trees(&c, &r, basis, &tu).unwrap();
                    let stored = t.get(&tu).cloned().unwrap_or_default();
                    assert_eq!(direct, stored, "{tu:?}");
                    nonzero += usize::from(!direct.is_zero());
                }
            }
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn corrupted_table_is_detected() {
        let (_, _, mut t) = table_for(&a2(), 4, 4);
        let (inputs, out) = t.arity(2).next().map(|(k, v)| (k.clone(), v.clone())).unwrap();
        let (id, c) = out.leading().map(|(i, c)| (i, c.clone())).unwrap();
        let bumped = out.add(&SparseVec::from_entries(alloc::vec![(id, c)]));
        t.set(inputs, bumped);
        assert!(!check_ainf_relations(&t, 4).is_ok());
    }

    #[test]
    fn kronecker_is_formal() {
        let k = Quiver::from_edges(&["1", "2"], &[("a", "1", "2"), ("b", "1", "2")]).unwrap();
        let (_, r, t) = table_for(&k, 3, 4);
        assert!(r.homology_dims().keys().all(|key| key.degree == 0));
        assert_eq!(t.count(3) + t.count(4), 0);
    }
}
