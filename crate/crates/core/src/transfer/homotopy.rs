//! Transferred higher products on homology.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use super::trees::{tree_sign, PbrTree};
use super::{sign, Contraction, Retraction};
use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::ginzburg::BlockComplex;
use crate::linalg::{Rational, SparseAccumulator, SparseVec};
use crate::quiver::BlockKey;

/// Global numbering of the homology basis, block by block in key order.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    keys: Vec<BlockKey>,
    local: Vec<usize>,
    labels: Vec<String>,
    offsets: BTreeMap<BlockKey, usize>,
    by_source: Vec<Vec<usize>>,
}

impl HomologyBasis {
    /// Each class is labelled by the leading path of its representative,
    /// bracketed when the representative is not that single path.
    pub fn new(c: &BlockComplex, r: &dyn Contraction) -> Self {
        let alg = c.algebra();
        let mut b = HomologyBasis {
            keys: Vec::new(),
            local: Vec::new(),
            labels: Vec::new(),
            offsets: BTreeMap::new(),
            by_source: alloc::vec![Vec::new(); c.quiver().vertex_count()],
        };
        let mut seen = BTreeMap::new();
        for key in c.keys() {
            let h = r.homology_dim(key);
            if h == 0 {
                continue;
            }
            b.offsets.insert(*key, b.keys.len());
            for k in 0..h {
                let rep = r.include(c, key, &SparseVec::unit(k));
                let (lead, coef) = rep.leading().expect("nonzero representative");
                let path = alg.basis_label(key, lead);
                let mut label = if rep.len() == 1 && coef.is_one() { path } else { format!("[{path}]") };
                let n = seen.entry(label.clone()).or_insert(0usize);
                *n += 1;
                if *n > 1 {
                    label = format!("{label}#{n}");
                }
                b.by_source[key.source].push(b.keys.len());
                b.keys.push(*key);
                b.local.push(k);
                b.labels.push(label);
            }
        }
        b
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, id: usize) -> BlockKey {
        self.keys[id]
    }

    pub fn local_index(&self, id: usize) -> usize {
        self.local[id]
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn id_of_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn id(&self, key: &BlockKey, k: usize) -> Option<usize> {
        self.offsets.get(key).map(|o| o + k)
    }

    /// Ids of the classes of one block, in local order.
    pub fn block_ids(&self, key: &BlockKey) -> core::ops::Range<usize> {
        match self.offsets.get(key) {
            Some(&o) => o..o + self.keys[o..].iter().take_while(|k| *k == key).count(),
            None => 0..0,
        }
    }

    pub fn starting_at(&self, vertex: usize) -> &[usize] {
        &self.by_source[vertex]
    }

    pub fn block_dim(&self, key: &BlockKey) -> usize {
        self.block_ids(key).len()
    }

    /// Local block coordinates to global ids.
    pub fn globalize(&self, key: &BlockKey, v: &SparseVec) -> SparseVec {
        match self.offsets.get(key) {
            Some(&o) => v.map_indices(|k| o + k),
            None => SparseVec::new(),
        }
    }

    /// Global ids (all in block `key`) to local block coordinates.
    pub fn localize(&self, key: &BlockKey, v: &SparseVec) -> SparseVec {
        let o = self.offsets.get(key).copied().unwrap_or(0);
        v.map_indices(|i| i - o)
    }

    /// Key of the output of `μ_n` on composable inputs.
    pub fn output_key(&self, inputs: &[usize]) -> Option<BlockKey> {
        let mut key = self.keys[*inputs.first()?];
        for &x in &inputs[1..] {
            key = key.compose(&self.keys[x])?;
        }
        Some(key.with_degree(key.degree + inputs.len() as i32 - 2))
    }
}

/// All composable tuples of length `n` starting with `first`, of total weight at most `max_weight`.
pub(crate) fn composable_tuples<'a>(
    n: usize,
    first: usize,
    max_weight: u32,
    target: &dyn Fn(usize) -> usize,
    weight: &dyn Fn(usize) -> u32,
    starting_at: &dyn Fn(usize) -> &'a [usize],
) -> Vec<Vec<usize>> {
    composable_tuples_where(n, first, max_weight, target, weight, starting_at, &|_| true)
}

/// As `composable_tuples`, dropping every branch whose prefix fails `keep`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn composable_tuples_where<'a>(
    n: usize,
    first: usize,
    max_weight: u32,
    target: &dyn Fn(usize) -> usize,
    weight: &dyn Fn(usize) -> u32,
    starting_at: &dyn Fn(usize) -> &'a [usize],
    keep: &dyn Fn(&[usize]) -> bool,
) -> Vec<Vec<usize>> {
    struct Walk<'w, 'a> {
        n: usize,
        max_weight: u32,
        target: &'w dyn Fn(usize) -> usize,
        weight: &'w dyn Fn(usize) -> u32,
        starting_at: &'w dyn Fn(usize) -> &'a [usize],
        keep: &'w dyn Fn(&[usize]) -> bool,
        out: Vec<Vec<usize>>,
    }
    impl Walk<'_, '_> {
        fn go(&mut self, t: &mut Vec<usize>, w: u32) {
            if !(self.keep)(t) {
                return;
            }
            if t.len() == self.n {
                self.out.push(t.clone());
                return;
            }
            let v = (self.target)(*t.last().expect("nonempty"));
            for &x in (self.starting_at)(v) {
                let wx = w + (self.weight)(x);
                if wx <= self.max_weight {
                    t.push(x);
                    self.go(t, wx);
                    t.pop();
                }
            }
        }
    }
    let mut walk = Walk { n, max_weight, target, weight, starting_at, keep, out: Vec::new() };
    if weight(first) <= max_weight {
        walk.go(&mut alloc::vec![first], weight(first));
    }
    walk.out
}

/// Stored higher products `μ_n` for `2 <= n <= n_max`, outputs in global ids.
#[derive(Clone, Debug)]
pub struct AInfinityTable {
    pub basis: HomologyBasis,
    pub max_weight: u32,
    pub n_max: usize,
    entries: BTreeMap<Vec<usize>, SparseVec>,
}

impl AInfinityTable {
    pub fn new(basis: HomologyBasis, max_weight: u32, n_max: usize) -> Self {
        Self { basis, max_weight, n_max, entries: BTreeMap::new() }
    }

    pub fn get(&self, inputs: &[usize]) -> Option<&SparseVec> {
        self.entries.get(inputs)
    }

    /// Zero outputs are not stored.
    pub fn set(&mut self, inputs: Vec<usize>, output: SparseVec) {
        if output.is_zero() {
            self.entries.remove(&inputs);
        } else {
            self.entries.insert(inputs, output);
        }
    }

    /// Entries in arity order, then by input ids.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &SparseVec)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        v.into_iter()
    }

    pub fn arity(&self, n: usize) -> impl Iterator<Item = (&Vec<usize>, &SparseVec)> {
        self.entries.iter().filter(move |(k, _)| k.len() == n)
    }

    pub fn count(&self, n: usize) -> usize {
        self.arity(n).count()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every entry preserves weight and raises degree by `n - 2`.
    pub fn check_bidegrees(&self) -> Result<()> {
        for (inputs, out) in &self.entries {
            let key = self.basis.output_key(inputs).ok_or_else(|| Error::Inconsistent("non-composable entry".into()))?;
            for (id, _) in out.iter() {
                if self.basis.key(id) != key {
                    return Err(Error::Inconsistent(format!(
                        "mu_{} on {:?} leaves its block",
                        inputs.len(),
                        inputs.iter().map(|&i| self.basis.label(i)).collect::<Vec<_>>()
                    )));
                }
            }
        }
        Ok(())
    }
}

struct Transferer<'a> {
    c: &'a BlockComplex,
    r: &'a dyn Contraction,
    basis: &'a HomologyBasis,
}

type Memo = BTreeMap<Vec<usize>, Element>;

impl Transferer<'_> {
    fn deg(&self, id: usize) -> i32 {
        self.basis.key(id).degree
    }

    fn key_of(&self, t: &[usize], extra: i32) -> BlockKey {
        let mut key = self.basis.key(t[0]);
        for &x in &t[1..] {
            key = key.compose(&self.basis.key(x)).expect("composable");
        }
        key.with_degree(key.degree + extra)
    }

    /// `ν'` applied to the tuple: `j` on a single input, `φ` of `Λ` otherwise.
    fn v(&self, t: &[usize], lam: &mut Memo, vee: &mut Memo) -> Result<Element> {
        if t.len() == 1 {
            let key = self.basis.key(t[0]);
            let h = SparseVec::unit(self.basis.local_index(t[0]));
            return Ok(Element { key, coords: self.r.include(self.c, &key, &h) });
        }
        if let Some(e) = vee.get(t) {
            return Ok(e.clone());
        }
        let l = self.lambda(t, lam, vee)?;
        let key = l.key.with_degree(l.key.degree + 1);
        let e = Element { key, coords: self.r.homotopy(self.c, &l.key, &l.coords) };
        vee.insert(t.to_vec(), e.clone());
        Ok(e)
    }

    /// `Σ_T sgn(T) ν_T(j x_1, ..., j x_n)`, through the root split of each tree.
    fn lambda(&self, t: &[usize], lam: &mut Memo, vee: &mut Memo) -> Result<Element> {
        if let Some(e) = lam.get(t) {
            return Ok(e.clone());
        }
        let key = self.key_of(t, t.len() as i32 - 2);
        let mut acc = SparseAccumulator::new();
        let mut left_degree = 0i32;
        for k in 1..t.len() {
            left_degree += self.deg(t[k - 1]);
            let right_arity = t.len() - k;
            let right_map_degree = if right_arity >= 2 { right_arity as i32 - 1 } else { 0 };
            let s = sign((k + 1) % 2 == 1) * sign((right_map_degree * left_degree).rem_euclid(2) == 1);
            let x = self.v(&t[..k], lam, vee)?;
            if x.is_zero() {
                continue;
            }
            let y = self.v(&t[k..], lam, vee)?;
            if y.is_zero() {
                continue;
            }
            let xy = self.c.multiply(&x, &y)?.expect("composable");
            acc.add_scaled(&s, &xy.coords);
        }
        let e = Element { key, coords: acc.finish() };
        lam.insert(t.to_vec(), e.clone());
        Ok(e)
    }

    fn mu(&self, t: &[usize], lam: &mut Memo, vee: &mut Memo) -> Result<SparseVec> {
        let l = self.lambda(t, lam, vee)?;
        Ok(self.basis.globalize(&l.key, &self.r.project(self.c, &l.key, &l.coords)))
    }
}

/// Transferred products `μ_n`, `2 <= n <= n_max`, on every composable tuple of
/// homology classes within the weight truncation of `c`.
pub fn transfer(c: &BlockComplex, r: &Retraction, n_max: usize) -> Result<AInfinityTable> {
    transfer_with(c, r, n_max)
}

pub fn transfer_with(c: &BlockComplex, r: &dyn Contraction, n_max: usize) -> Result<AInfinityTable> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2".into()));
    }
    let basis = HomologyBasis::new(c, r);
    let tr = Transferer { c, r, basis: &basis };
    let max_weight = c.max_weight();
    let firsts: Vec<usize> = (0..basis.len()).collect();
    // Outputs of μ_n have degree Σ|x_i| + n − 2; prefixes that cannot reach a
    // homology degree are not extended.
    let degrees = (0..basis.len()).map(|x| basis.key(x).degree);
    let (lo, hi) = degrees.fold((i32::MAX, i32::MIN), |(l, h), d| (l.min(d), h.max(d)));
    let parts = crate::par_map(&firsts, |&first| -> Result<Vec<(Vec<usize>, SparseVec)>> {
        let (mut lam, mut vee) = (Memo::new(), Memo::new());
        let mut out = Vec::new();
        for n in 2..=n_max {
            let reachable = |t: &[usize]| {
                let d: i32 = t.iter().map(|&x| basis.key(x).degree).sum();
                d + (n - t.len()) as i32 * lo + n as i32 - 2 <= hi
            };
            let tuples = composable_tuples_where(
                n,
                first,
                max_weight,
                &|x| basis.key(x).target,
                &|x| basis.key(x).weight,
                &|v| basis.starting_at(v),
                &reachable,
            );
            for t in tuples {
                let key = basis.output_key(&t).expect("composable");
                if basis.block_dim(&key) == 0 {
                    continue;
                }
                let m = tr.mu(&t, &mut lam, &mut vee)?;
                if !m.is_zero() {
                    out.push((t, m));
                }
            }
        }
        Ok(out)
    });
    let mut table = AInfinityTable::new(basis.clone(), max_weight, n_max);
    for p in parts {
        for (t, m) in p? {
            table.set(t, m);
        }
    }
    Ok(table)
}

/// `μ_T` on one tuple, evaluated directly along the tree without signs from `sgn(T)`.
pub fn evaluate_mu_tree(
    c: &BlockComplex,
    r: &dyn Contraction,
    basis: &HomologyBasis,
    tree: &PbrTree,
    inputs: &[usize],
) -> Result<SparseVec> {
    if tree.leaves() != inputs.len() || inputs.len() < 2 {
        return Err(Error::InvalidArgument("tree and input arity differ".into()));
    }
    let tr = Transferer { c, r, basis };
    // ν'_T on the inputs, and the degree of ν'_T as a map.
    fn nu(tr: &Transferer<'_>, t: &PbrTree, x: &[usize], prime: bool) -> Result<(Element, i32)> {
        match t {
            PbrTree::Leaf => {
                let key = tr.basis.key(x[0]);
                let h = SparseVec::unit(tr.basis.local_index(x[0]));
                Ok((Element { key, coords: tr.r.include(tr.c, &key, &h) }, 0))
            }
            PbrTree::Node(l, rt) => {
                let k = l.leaves();
                let (a, _) = nu(tr, l, &x[..k], true)?;
                let (b, db) = nu(tr, rt, &x[k..], true)?;
                let left_degree: i32 = x[..k].iter().map(|&i| tr.deg(i)).sum();
                let s = sign((db * left_degree).rem_euclid(2) == 1);
                let mut p = tr.c.multiply(&a, &b)?.expect("composable");
                p.coords = p.coords.scaled(&s);
                let d = x.len() as i32 - 2;
                if prime {
                    let key = p.key.with_degree(p.key.degree + 1);
                    Ok((Element { key, coords: tr.r.homotopy(tr.c, &p.key, &p.coords) }, d + 1))
                } else {
                    Ok((p, d))
                }
            }
        }
    }
    let (e, _) = nu(&tr, tree, inputs, false)?;
    Ok(basis.globalize(&e.key, &r.project(c, &e.key, &e.coords)))
}

/// `Σ_T sgn(T) μ_T` computed tree by tree; agrees with the memoized transfer.
pub fn mu_by_trees(
    c: &BlockComplex,
    r: &dyn Contraction,
    basis: &HomologyBasis,
    inputs: &[usize],
) -> Result<SparseVec> {
    let mut acc = SparseAccumulator::new();
    for t in super::trees::enumerate_pbr(inputs.len()) {
        let s: Rational = if tree_sign(&t) > 0 { Rational::one() } else { -Rational::one() };
        acc.add_scaled(&s, &evaluate_mu_tree(c, r, basis, &t, inputs)?);
    }
    Ok(acc.finish())
}
