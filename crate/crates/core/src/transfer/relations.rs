//! The Stasheff relations, checked element by element.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::homotopy::{composable_tuples, AInfinityTable};
use super::sign;
use crate::algebra::Element;
use crate::ginzburg::BlockComplex;
use crate::linalg::{SparseAccumulator, SparseVec};
use crate::quiver::BlockKey;

/// A bigraded A∞-category on finitely many basis elements, each living in
/// one block. `mu` takes basis ids and returns a vector over basis ids.
pub trait AInfinityStructure: Sync {
    fn basis_len(&self) -> usize;
    fn key(&self, x: usize) -> BlockKey;
    fn starting_at(&self, vertex: usize) -> &[usize];
    fn max_weight(&self) -> u32;
    fn label(&self, x: usize) -> String;
    fn mu(&self, inputs: &[usize]) -> SparseVec;
}

impl AInfinityStructure for AInfinityTable {
    fn basis_len(&self) -> usize {
        self.basis.len()
    }

    fn key(&self, x: usize) -> BlockKey {
        self.basis.key(x)
    }

    fn starting_at(&self, vertex: usize) -> &[usize] {
        self.basis.starting_at(vertex)
    }

    fn max_weight(&self) -> u32 {
        self.max_weight
    }

    fn label(&self, x: usize) -> String {
        self.basis.label(x).into()
    }

    fn mu(&self, inputs: &[usize]) -> SparseVec {
        self.get(inputs).cloned().unwrap_or_default()
    }
}

/// A dg category viewed as an A∞-category with `μ₁ = d`, `μ₂` the product and no higher products.
pub struct DgStructure<'a> {
    c: &'a BlockComplex,
    keys: Vec<BlockKey>,
    local: Vec<usize>,
    offsets: BTreeMap<BlockKey, usize>,
    by_source: Vec<Vec<usize>>,
}

impl<'a> DgStructure<'a> {
    pub fn new(c: &'a BlockComplex) -> Self {
        let mut s = DgStructure {
            c,
            keys: Vec::new(),
            local: Vec::new(),
            offsets: BTreeMap::new(),
            by_source: alloc::vec![Vec::new(); c.quiver().vertex_count()],
        };
        for key in c.keys() {
            s.offsets.insert(*key, s.keys.len());
            for i in 0..c.dim(key) {
                s.by_source[key.source].push(s.keys.len());
                s.keys.push(*key);
                s.local.push(i);
            }
        }
        s
    }

    fn element(&self, x: usize) -> Element {
        Element { key: self.keys[x], coords: SparseVec::unit(self.local[x]) }
    }

    fn globalize(&self, e: &Element) -> SparseVec {
        match self.offsets.get(&e.key) {
            Some(&o) => e.coords.map_indices(|i| o + i),
            None => SparseVec::new(),
        }
    }
}

impl AInfinityStructure for DgStructure<'_> {
    fn basis_len(&self) -> usize {
        self.keys.len()
    }

    fn key(&self, x: usize) -> BlockKey {
        self.keys[x]
    }

    fn starting_at(&self, vertex: usize) -> &[usize] {
        &self.by_source[vertex]
    }

    fn max_weight(&self) -> u32 {
        self.c.max_weight()
    }

    fn label(&self, x: usize) -> String {
        self.c.algebra().basis_label(&self.keys[x], self.local[x])
    }

    fn mu(&self, inputs: &[usize]) -> SparseVec {
        match inputs {
            [x] => {
                let key = self.keys[*x];
                let dx = self.c.d_basis(&key, self.local[*x]).clone();
                self.globalize(&Element { key: key.with_degree(key.degree - 1), coords: dx })
            }
            [x, y] => {
                let p = self.c.multiply(&self.element(*x), &self.element(*y)).ok().flatten();
                p.map(|e| self.globalize(&e)).unwrap_or_default()
            }
            _ => SparseVec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub inputs: Vec<usize>,
    pub residual: SparseVec,
}

#[derive(Clone, Debug, Default)]
pub struct RelationReport {
    /// Number of tuples checked, by arity.
    pub checked: BTreeMap<usize, usize>,
    pub violations: Vec<Violation>,
}

impl RelationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Left-hand side of the relation of arity `inputs.len()`.
pub fn relation_residual(s: &dyn AInfinityStructure, inputs: &[usize]) -> SparseVec {
    let n = inputs.len();
    let mut acc = SparseAccumulator::new();
    let mut prefix_degree = 0i32;
    for p in 0..n {
        if p > 0 {
            prefix_degree += s.key(inputs[p - 1]).degree;
        }
        for q in 1..=n - p {
            let r = n - p - q;
            let inner = s.mu(&inputs[p..p + q]);
            if inner.is_zero() {
                continue;
            }
            let sg = sign(((p + q * r) as i32 + q as i32 * prefix_degree).rem_euclid(2) == 1);
            let mut outer: Vec<usize> = Vec::with_capacity(p + 1 + r);
            outer.extend_from_slice(&inputs[..p]);
            outer.push(0);
            outer.extend_from_slice(&inputs[p + q..]);
            for (y, c) in inner.iter() {
                outer[p] = y;
                let v = s.mu(&outer);
                if !v.is_zero() {
                    acc.add_scaled(&(&sg * c), &v);
                }
            }
        }
    }
    acc.finish()
}

/// Evaluates every relation of arity `1..=n_max` on every composable tuple within the weight truncation.
pub fn check_ainf_relations(s: &dyn AInfinityStructure, n_max: usize) -> RelationReport {
    let firsts: Vec<usize> = (0..s.basis_len()).collect();
    let parts = crate::par_map(&firsts, |&first| {
        let mut checked: BTreeMap<usize, usize> = BTreeMap::new();
        let mut violations = Vec::new();
        for n in 1..=n_max {
            let tuples = composable_tuples(
                n,
                first,
                s.max_weight(),
                &|x| s.key(x).target,
                &|x| s.key(x).weight,
                &|v| s.starting_at(v),
            );
            *checked.entry(n).or_default() += tuples.len();
            for t in tuples {
                let res = relation_residual(s, &t);
                if !res.is_zero() {
                    violations.push(Violation { inputs: t, residual: res });
                }
            }
        }
        (checked, violations)
    });
    let mut report = RelationReport::default();
    for (checked, violations) in parts {
        for (n, k) in checked {
            *report.checked.entry(n).or_default() += k;
        }
        report.violations.extend(violations);
    }
    report
}
