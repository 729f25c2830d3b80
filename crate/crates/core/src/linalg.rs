//! Exact rational linear algebra: dense matrices with deterministic
//! elimination, and sparse vectors with an incremental echelon basis.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Always `p/q`, including integers, so serialized coefficients have one shape.
pub fn format_rational(r: &Rational) -> alloc::string::String {
    alloc::format!("{}/{}", r.numer(), r.denom())
}

#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + a * b;
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.rows == other.rows && self.cols == other.cols, "dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert!(self.rows == other.rows && self.cols == other.cols, "dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form. Pivots are taken in the leftmost column that
    /// still has a nonzero entry, from the topmost such row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(lead, p);
            let inv = m.get(lead, c).recip();
            for k in c..m.cols {
                let v = m.get(lead, k) * &inv;
                m.set(lead, k, v);
            }
            for r in 0..m.rows {
                if r == lead || m.get(r, c).is_zero() {
                    continue;
                }
                let f = m.get(r, c).clone();
                for k in c..m.cols {
                    let lv = m.get(lead, k);
                    if !lv.is_zero() {
                        let v = m.get(r, k) - &f * lv;
                        m.set(r, k, v);
                    }
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Null space basis: one vector per free column (ascending), with a 1 in
    /// that coordinate and zeros in the other free coordinates.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    /// A particular solution of `m x = b` with every free variable zero.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = red.get(row, self.cols).clone();
        }
        Some(x)
    }
}

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVec {
    entries: Vec<(usize, Rational)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        Self { entries: vec![(i, Rational::one())] }
    }

    /// Sums duplicates and drops zeros.
    pub fn from_entries(mut entries: Vec<(usize, Rational)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, Rational)> = Vec::with_capacity(entries.len());
        for (i, c) in entries {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|e| !e.1.is_zero());
        Self { entries: out }
    }

    pub fn from_dense(v: &[Rational]) -> Self {
        Self {
            entries: v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); dim];
        for (i, c) in &self.entries {
            v[*i] = c.clone();
        }
        v
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Rational {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, c)| (*i, c))
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Self { entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { entries: self.entries.iter().map(|(i, x)| (*i, -x.clone())).collect() }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Rational, other: &Self) -> Self {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y * c));
                        b.next();
                    } else {
                        let s = x + y * c;
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        Self { entries: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(&Rational::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(&-Rational::one(), other)
    }

    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> Self {
        Self::from_entries(self.entries.iter().map(|(i, c)| (f(*i), c.clone())).collect())
    }
}

/// Accumulates sparse terms; cheaper than repeated `add_scaled` for long sums.
#[derive(Clone, Debug, Default)]
pub struct SparseAccumulator {
    terms: alloc::collections::BTreeMap<usize, Rational>,
}

impl SparseAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, i: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(i).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&i);
        }
    }

    pub fn add_scaled(&mut self, c: &Rational, v: &SparseVec) {
        for (i, x) in v.iter() {
            self.add_term(i, x * c);
        }
    }

    pub fn finish(self) -> SparseVec {
        SparseVec { entries: self.terms.into_iter().collect() }
    }
}

pub enum Inserted {
    /// The vector became a new echelon row with this pivot column.
    Pivot(usize),
    /// The vector was dependent; carries the reduced tag.
    Dependent(SparseVec),
}

/// Incrementally built row echelon basis of a subspace of `Q^dim`.
///
/// Each row's leading column is its pivot and its leading coefficient is 1.
/// Rows are only reduced against rows inserted earlier, which is enough for
/// the remainder of a reduction to be the unique vector in `v + span` that
/// vanishes on every pivot column.
///
/// Every row may carry a tag, a vector in some other space that is tracked
/// through the same linear combinations (used for preimages).
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    pivot_of_col: Vec<u32>,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
    tags: Vec<SparseVec>,
    tagged: bool,
}

const NO_ROW: u32 = u32::MAX;

pub struct Reduction {
    pub remainder: SparseVec,
    /// `v = remainder + sum coeff * row`.
    pub coefficients: Vec<(usize, Rational)>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Self { dim, pivot_of_col: vec![NO_ROW; dim], rows: Vec::new(), pivots: Vec::new(), tags: Vec::new(), tagged: false }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn tag(&self, row: usize) -> &SparseVec {
        &self.tags[row]
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_of_col[col] != NO_ROW
    }

    /// Sweep left to right, clearing every pivot column of `v`.
    pub fn reduce(&self, v: &SparseVec) -> Reduction {
        let mut acc: alloc::collections::BTreeMap<usize, Rational> = v.entries.iter().cloned().collect();
        let mut coefficients = Vec::new();
        let mut cursor = 0usize;
        loop {
            let next = acc
                .range(cursor..)
                .find(|(k, _)| self.pivot_of_col[**k] != NO_ROW)
                .map(|(k, c)| (*k, c.clone()));
            let Some((col, c)) = next else { break };
            let row = self.pivot_of_col[col] as usize;
            for (i, x) in self.rows[row].iter() {
                let slot = acc.entry(i).or_insert_with(Rational::zero);
                *slot -= x * &c;
                if slot.is_zero() {
                    acc.remove(&i);
                }
            }
            coefficients.push((row, c));
            cursor = col + 1;
        }
        Reduction { remainder: SparseVec { entries: acc.into_iter().collect() }, coefficients }
    }

    /// Whether `v` lies in the span.
    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).remainder.is_zero()
    }

    /// `tag - sum coeff * tag(row)` for the coefficients of a reduction.
    pub fn combine_tags(&self, tag: &SparseVec, coefficients: &[(usize, Rational)]) -> SparseVec {
        let mut acc = SparseAccumulator::new();
        acc.add_scaled(&Rational::one(), tag);
        for (row, c) in coefficients {
            acc.add_scaled(&-c.clone(), &self.tags[*row]);
        }
        acc.finish()
    }

    pub fn insert(&mut self, v: &SparseVec) -> Inserted {
        self.insert_tagged(v, SparseVec::new())
    }

    pub fn insert_tagged(&mut self, v: &SparseVec, tag: SparseVec) -> Inserted {
        let red = self.reduce(v);
        self.tagged |= !tag.is_zero();
        let tag = if self.tagged { self.combine_tags(&tag, &red.coefficients) } else { tag };
        match red.remainder.leading() {
            None => Inserted::Dependent(tag),
            Some((col, lead)) => {
                let inv = lead.recip();
                let row = red.remainder.scaled(&inv);
                let tag = tag.scaled(&inv);
                self.pivot_of_col[col] = self.rows.len() as u32;
                self.rows.push(row);
                self.pivots.push(col);
                self.tags.push(tag);
                Inserted::Pivot(col)
            }
        }
    }
}

/// One solution of the sparse system `row · x = rhs`, free unknowns set to
/// zero, or `None` if the system is inconsistent.
pub fn solve_sparse(equations: &[(SparseVec, Rational)], unknowns: usize) -> Option<Vec<Rational>> {
    let mut e = Echelon::new(unknowns + 1);
    for (row, rhs) in equations {
        let mut v = row.clone();
        if !rhs.is_zero() {
            v = v.add(&SparseVec::from_entries(vec![(unknowns, rhs.clone())]));
        }
        if let Inserted::Pivot(col) = e.insert(&v) {
            if col == unknowns {
                return None;
            }
        }
    }
    let mut x = vec![Rational::zero(); unknowns];
    let mut order: Vec<usize> = (0..e.rank()).collect();
    order.sort_by_key(|&r| core::cmp::Reverse(e.pivots()[r]));
    for r in order {
        let p = e.pivots()[r];
        let mut val = Rational::zero();
        for (c, a) in e.rows()[r].iter() {
            if c == unknowns {
                val += a;
            } else if c != p {
                val -= a * &x[c];
            }
        }
        x[p] = val;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_solve_small_systems() {
        // x0 + x1 = 3, x1 - x2 = 1, x0 + x2 = 2
        let eq = |t: &[(usize, i64)], b: i64| (SparseVec::from_entries(t.iter().map(|&(i, c)| (i, rat(c))).collect()), rat(b));
        let sys = [eq(&[(0, 1), (1, 1)], 3), eq(&[(1, 1), (2, -1)], 1), eq(&[(0, 1), (2, 1)], 2)];
        let x = solve_sparse(&sys, 3).unwrap();
        for (row, b) in &sys {
            let lhs: Rational = row.iter().map(|(i, c)| c * &x[i]).sum();
            assert_eq!(&lhs, b);
        }
        let bad = [eq(&[(0, 1)], 1), eq(&[(0, 2)], 3)];
        assert!(solve_sparse(&bad, 1).is_none());
    }

    #[test]
    fn rref_examples() {
        let (r, p) = RationalMatrix::from_i64(&[&[1, 1], &[1, 1]]).rref();
        assert_eq!(r, RationalMatrix::from_i64(&[&[1, 1], &[0, 0]]));
        assert_eq!(p, vec![0]);
        let (r, p) = RationalMatrix::identity(3).rref();
        assert_eq!(r, RationalMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
        let (r, p) = RationalMatrix::from_i64(&[&[0, 2], &[3, 0]]).rref();
        assert_eq!(r, RationalMatrix::identity(2));
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn kernel_examples() {
        let k = RationalMatrix::from_i64(&[&[1, 1], &[1, 1]]).kernel_basis();
        assert_eq!(k, vec![vec![rat(-1), rat(1)]]);
        assert!(RationalMatrix::identity(4).kernel_basis().is_empty());
        let k = RationalMatrix::zeros(2, 3).kernel_basis();
        assert_eq!(k.len(), 3);
        for (i, v) in k.iter().enumerate() {
            assert_eq!(SparseVec::from_dense(v), SparseVec::unit(i));
        }
    }

    #[test]
    fn solve_examples() {
        let b = vec![rat(3), ratio(1, 2)];
        assert_eq!(RationalMatrix::identity(2).solve(&b), Some(b.clone()));
        assert_eq!(RationalMatrix::from_i64(&[&[1, 1]]).solve(&[rat(2)]), Some(vec![rat(2), rat(0)]));
        assert_eq!(RationalMatrix::from_i64(&[&[0]]).solve(&[rat(1)]), None);
    }

    #[test]
    fn echelon_remainder_is_canonical() {
        let mut e = Echelon::new(4);
        e.insert(&SparseVec::from_dense(&[rat(0), rat(1), rat(1), rat(0)]));
        e.insert(&SparseVec::from_dense(&[rat(1), rat(2), rat(0), rat(1)]));
        let v = SparseVec::from_dense(&[rat(3), rat(1), rat(0), rat(5)]);
        let red = e.reduce(&v);
        for &p in e.pivots() {
            assert!(red.remainder.get(p).is_zero());
        }
        let mut rebuilt = red.remainder.clone();
        for (row, c) in &red.coefficients {
            rebuilt = rebuilt.add_scaled(c, &e.rows()[*row]);
        }
        assert_eq!(rebuilt, v);
        let shifted = v.add_scaled(&rat(7), &e.rows()[0]).add_scaled(&ratio(-2, 3), &e.rows()[1]);
        assert_eq!(e.reduce(&shifted).remainder, red.remainder);
    }

    #[test]
    fn echelon_tags_track_combinations() {
        let mut e = Echelon::new(2);
        e.insert_tagged(&SparseVec::from_dense(&[rat(1), rat(1)]), SparseVec::unit(0));
        e.insert_tagged(&SparseVec::from_dense(&[rat(1), rat(-1)]), SparseVec::unit(1));
        match e.insert_tagged(&SparseVec::from_dense(&[rat(2), rat(0)]), SparseVec::unit(2)) {
            Inserted::Dependent(t) => {
                assert_eq!(t, SparseVec::from_dense(&[rat(-1), rat(-1), rat(1)]));
            }
            Inserted::Pivot(_) => panic!("expected dependence"),
        }
    }
}
