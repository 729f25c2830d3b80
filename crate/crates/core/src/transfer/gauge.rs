//! Moving a minimal model along an A∞-isomorphism `(id, F)` with `F` binary,
//! raising degree by one.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::homotopy::{composable_tuples, AInfinityTable, HomologyBasis};
use super::sign;
use crate::linalg::{solve_sparse, Rational, SparseAccumulator, SparseVec};

/// One component `f_k` of an A∞-isomorphism `(id, 0, …, 0, f_k)`; `f_k` raises
/// degree by `k − 1`. Inputs and outputs in global ids.
#[derive(Clone, Debug, Default)]
pub struct Gauge {
    pub arity: usize,
    pub map: BTreeMap<Vec<usize>, SparseVec>,
}

impl Gauge {
    pub fn new(arity: usize) -> Self {
        Self { arity, map: BTreeMap::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, inputs: &[usize]) -> Option<&SparseVec> {
        self.map.get(inputs)
    }
}

/// `μ_r` on a tuple of vectors, expanded multilinearly.
fn mu_multilinear(t: &AInfinityTable, args: &[SparseVec]) -> SparseVec {
    let mut acc = SparseAccumulator::new();
    let mut ids = Vec::with_capacity(args.len());
    fn go(t: &AInfinityTable, args: &[SparseVec], ids: &mut Vec<usize>, c: Rational, acc: &mut SparseAccumulator) {
        if ids.len() == args.len() {
            if let Some(v) = t.get(ids) {
                acc.add_scaled(&c, v);
            }
            return;
        }
        for (i, x) in args[ids.len()].iter() {
            ids.push(i);
            go(t, args, ids, &c * x, acc);
            ids.pop();
        }
    }
    go(t, args, &mut ids, Rational::one(), &mut acc);
    acc.finish()
}

/// Compositions of `n` into parts `1` and `k`.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in [1, k] {
        if first <= n && (first == 1 || k > 1) {
            for mut rest in compositions(n - first, k) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
    }
    out
}

/// The structure `μ'` making `(id, f_k)` an A∞-morphism from `μ'` to `μ`:
/// `μ'_n = Σ ± μ_r(f_{i_1} ⊗ … ⊗ f_{i_r}) − Σ ± f_k(1^a ⊗ μ'_{n−k+1} ⊗ 1^b)`.
pub fn apply_gauge(table: &AInfinityTable, f: &Gauge) -> AInfinityTable {
    let k = f.arity;
    assert!(k >= 2, "gauge components start in arity two");
    let basis = &table.basis;
    let deg = |x: usize| basis.key(x).degree;
    let mut out = AInfinityTable::new(basis.clone(), table.max_weight, table.n_max);
    let firsts: Vec<usize> = (0..basis.len()).collect();
    for n in 2..=table.n_max {
        let comps = compositions(n, k);
        let prev = &out;
        let level = crate::par_map(&firsts, |&first| {
            let mut entries = Vec::new();
            let tuples = composable_tuples(
                n,
                first,
                table.max_weight,
                &|x| basis.key(x).target,
                &|x| basis.key(x).weight,
                &|v| basis.starting_at(v),
            );
            for t in tuples {
                let key = basis.output_key(&t).expect("composable");
                if basis.block_dim(&key) == 0 {
                    continue;
                }
                let mut acc = SparseAccumulator::new();
                'comp: for comp in &comps {
                    let r = comp.len();
                    if r < 2 {
                        continue;
                    }
                    let mut odd = 0usize;
                    let mut args = Vec::with_capacity(r);
                    let mut pos = 0;
                    let mut before = 0i32;
                    for (j, &i) in comp.iter().enumerate() {
                        if i == 1 {
                            args.push(SparseVec::unit(t[pos]));
                        } else {
                            match f.get(&t[pos..pos + i]) {
                                Some(v) => args.push(v.clone()),
                                None => continue 'comp,
                            }
                            odd += (r - 1 - j) * (i - 1) + (i - 1) * before.rem_euclid(2) as usize;
                        }
                        for &x in &t[pos..pos + i] {
                            before += deg(x);
                        }
                        pos += i;
                    }
                    let v = mu_multilinear(table, &args);
                    if !v.is_zero() {
                        acc.add_scaled(&sign(odd % 2 == 1), &v);
                    }
                }
                // f_k(1^a ⊗ μ'_s ⊗ 1^b) with a + b = k − 1, sign (−1)^{a + s b + s Σ_{i<a}|x_i|}.
                let s = n + 1 - k;
                if s >= 2 {
                    let mut before = 0i32;
                    for a in 0..k {
                        let b = k - 1 - a;
                        if let Some(inner) = prev.get(&t[a..a + s]) {
                            let odd = a + s * b + s * before.rem_euclid(2) as usize;
                            let c = -sign(odd % 2 == 1);
                            let mut args: Vec<usize> = t[..a].to_vec();
                            args.push(0);
                            args.extend_from_slice(&t[a + s..]);
                            for (y, cy) in inner.iter() {
                                args[a] = y;
                                if let Some(v) = f.get(&args) {
                                    acc.add_scaled(&(&c * cy), v);
                                }
                            }
                        }
                        before += deg(t[a]);
                    }
                }
                entries.push((t, acc.finish()));
            }
            entries
        });
        for part in level {
            for (t, v) in part {
                out.set(t, v);
            }
        }
    }
    out
}

/// Whether `x` is an idempotent `e_i`.
pub(crate) fn is_unit(basis: &HomologyBasis, x: usize) -> bool {
    let k = basis.key(x);
    k.source == k.target && k.weight == 0 && k.degree == 0
}

/// Solves `δ f_k = −μ_{k+1}` for `f_k` vanishing on idempotents and returns
/// the gauged model, whose `μ_{k+1}` is zero and whose lower products are
/// unchanged; `None` if `μ_{k+1}` is not a coboundary within the truncation.
pub fn kill_arity(table: &AInfinityTable, k: usize) -> Option<(AInfinityTable, Gauge)> {
    assert!(k >= 2 && k < table.n_max);
    if table.count(k + 1) == 0 {
        return Some((table.clone(), Gauge::new(k)));
    }
    let basis = &table.basis;
    let deg = |x: usize| basis.key(x).degree;
    // Unknowns: one column per output coordinate of f_k on each composable k-tuple.
    let mut cols: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
    let mut count = 0;
    for first in 0..basis.len() {
        for t in composable_tuples(k, first, table.max_weight, &|x| basis.key(x).target, &|x| basis.key(x).weight, &|v| {
            basis.starting_at(v)
        }) {
            if t.iter().any(|&x| is_unit(basis, x)) {
                continue;
            }
            let key = basis.output_key(&t).expect("composable");
            let key = key.with_degree(key.degree + 1);
            let ids = basis.block_ids(&key);
            if !ids.is_empty() {
                cols.insert(t, (ids.start, count));
                count += ids.len();
            }
        }
    }
    let firsts: Vec<usize> = (0..basis.len()).collect();
    let mu2 = |x: usize, y: usize| table.get(&[x, y]).cloned().unwrap_or_default();
    let parts = crate::par_map(&firsts, |&first| {
        let mut eqs = Vec::new();
        let tuples = composable_tuples(
            k + 1,
            first,
            table.max_weight,
            &|x| basis.key(x).target,
            &|x| basis.key(x).weight,
            &|v| basis.starting_at(v),
        );
        for t in tuples {
            let key = basis.output_key(&t).expect("composable");
            if basis.block_dim(&key) == 0 {
                continue;
            }
            let mut e: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
            let mut add = |o: usize, col: usize, c: Rational| {
                let slot = e.entry((o, col)).or_insert_with(Rational::zero);
                *slot += c;
            };
            let f = |args: &[usize]| cols.get(args).map(|&(start, col)| (start, col, basis.block_ids(&basis.key(start)).len()));
            // (−1)^{(k−1)|x_1|} μ_2(x_1, f(x_2..))
            if let Some((start, col, dim)) = f(&t[1..]) {
                let s = sign(((k as i32 - 1) * deg(t[0])).rem_euclid(2) == 1);
                for i in 0..dim {
                    for (o, a) in mu2(t[0], start + i).iter() {
                        add(o, col + i, &s * a);
                    }
                }
            }
            // (−1)^{k−1} μ_2(f(..x_k), x_{k+1})
            if let Some((start, col, dim)) = f(&t[..k]) {
                let s = sign((k - 1) % 2 == 1);
                for i in 0..dim {
                    for (o, a) in mu2(start + i, t[k]).iter() {
                        add(o, col + i, &s * a);
                    }
                }
            }
            // −(−1)^r f(x_1..x_r, μ_2(x_{r+1}, x_{r+2}), ..)
            for r in 0..k {
                let s = -sign(r % 2 == 1);
                let mut args: Vec<usize> = t[..r].to_vec();
                args.push(0);
                args.extend_from_slice(&t[r + 2..]);
                for (m, a) in mu2(t[r], t[r + 1]).iter() {
                    args[r] = m;
                    if let Some((start, col, dim)) = f(&args) {
                        for i in 0..dim {
                            add(start + i, col + i, &s * a);
                        }
                    }
                }
            }
            let target = table.get(&t).cloned().unwrap_or_default();
            let mut by_out: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
            for ((o, col), a) in e {
                if !a.is_zero() {
                    by_out.entry(o).or_default().push((col, a));
                }
            }
            for o in basis.block_ids(&key) {
                let row = by_out.remove(&o).unwrap_or_default();
                let rhs = -target.get(o);
                if !row.is_empty() || !rhs.is_zero() {
                    eqs.push((SparseVec::from_entries(row), rhs));
                }
            }
        }
        eqs
    });
    let equations: Vec<_> = parts.into_iter().flatten().collect();
    let x = solve_sparse(&equations, count)?;
    let mut g = Gauge::new(k);
    for (t, &(start, col)) in &cols {
        let dim = basis.block_ids(&basis.key(start)).len();
        let v = SparseVec::from_entries((0..dim).map(|i| (start + i, x[col + i].clone())).collect());
        if !v.is_zero() {
            g.map.insert(t.clone(), v);
        }
    }
    Some((apply_gauge(table, &g), g))
}
