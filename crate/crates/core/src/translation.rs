//! The derived translation algebra `U_Q`, the twisted polynomial algebra
//! `Λ^ν[u] = kΩ/J`, block-by-block isomorphism checks between bigraded
//! algebras, and the triangle prediction for `μ₃`.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::algebra::{build_quotient, double_quiver, preprojective, preprojective_relator, Element, GradedQuotientAlgebra, PathVector};
use crate::error::{Error, Result};
use crate::linalg::{solve_sparse, Echelon, Rational, SparseAccumulator, SparseVec};
use crate::mesh::{knit, nakayama_and_n, DynkinData, MeshFragment, RepArrow, RepArrowKind, RepVertex, RepetitiveSlice};
use crate::quiver::{BlockKey, Bidegree, Path, Quiver};
use crate::ginzburg::BlockComplex;
use crate::transfer::{apply_gauge, composable_tuples, AInfinityTable, Gauge, Contraction, HomologyBasis};

/// A block-graded algebra over the vertices of a quiver, truncated by weight.
pub trait BigradedAlgebra: Sync {
    fn max_weight(&self) -> u32;
    /// Dimensions of the nonzero blocks.
    fn block_dims(&self) -> BTreeMap<BlockKey, usize>;
    fn dim(&self, key: &BlockKey) -> usize;
    fn basis_label(&self, key: &BlockKey, k: usize) -> String;
    fn multiply(&self, x: &Element, y: &Element) -> Result<Option<Element>>;
    fn unit(&self, vertex: usize) -> Option<Element>;
}

impl BigradedAlgebra for GradedQuotientAlgebra {
    fn max_weight(&self) -> u32 {
        GradedQuotientAlgebra::max_weight(self)
    }

    fn block_dims(&self) -> BTreeMap<BlockKey, usize> {
        GradedQuotientAlgebra::block_dims(self).into_iter().filter(|(_, d)| *d > 0).collect()
    }

    fn dim(&self, key: &BlockKey) -> usize {
        GradedQuotientAlgebra::dim(self, key)
    }

    fn basis_label(&self, key: &BlockKey, k: usize) -> String {
        GradedQuotientAlgebra::basis_label(self, key, k)
    }

    fn multiply(&self, x: &Element, y: &Element) -> Result<Option<Element>> {
        self.multiply_elements(x, y)
    }

    fn unit(&self, vertex: usize) -> Option<Element> {
        self.element_of_path(&Path::trivial(vertex)).ok()
    }
}

/// The homology algebra with the transferred `μ₂`.
impl BigradedAlgebra for AInfinityTable {
    fn max_weight(&self) -> u32 {
        self.max_weight
    }

    fn block_dims(&self) -> BTreeMap<BlockKey, usize> {
        let mut out = BTreeMap::new();
        for id in 0..self.basis.len() {
            *out.entry(self.basis.key(id)).or_insert(0) += 1;
        }
        out
    }

    fn dim(&self, key: &BlockKey) -> usize {
        self.basis.block_dim(key)
    }

    fn basis_label(&self, key: &BlockKey, k: usize) -> String {
        self.basis.label(self.basis.id(key, k).expect("basis element")).into()
    }

    fn multiply(&self, x: &Element, y: &Element) -> Result<Option<Element>> {
        let Some(key) = x.key.compose(&y.key) else { return Ok(None) };
        if key.weight > self.max_weight {
            return Err(Error::TruncationOverflow { weight: key.weight, max_weight: self.max_weight });
        }
        let mut acc = SparseAccumulator::new();
        for (i, a) in x.coords.iter() {
            let gi = self.basis.id(&x.key, i).expect("basis element");
            for (j, b) in y.coords.iter() {
                let gj = self.basis.id(&y.key, j).expect("basis element");
                if let Some(v) = self.get(&[gi, gj]) {
                    acc.add_scaled(&(a * b), v);
                }
            }
        }
        Ok(Some(Element { key, coords: self.basis.localize(&key, &acc.finish()) }))
    }

    fn unit(&self, vertex: usize) -> Option<Element> {
        let key = BlockKey::new(vertex, vertex, 0, 0);
        (self.basis.block_dim(&key) == 1).then(|| Element { key, coords: SparseVec::unit(0) })
    }
}

/// `ν` on the arrows of the doubled quiver: the unique arrow `ν(s) → ν(t)`
/// for an arrow `s → t`. Its coefficient is `nakayama_sign`.
pub fn nakayama_on_arrows(q: &Quiver, d: &DynkinData) -> Result<Vec<usize>> {
    let bar = double_quiver(q)?;
    (0..bar.arrow_count())
        .map(|g| {
            let a = bar.arrow(g);
            let (s, t) = (d.nu[a.source], d.nu[a.target]);
            let hits: Vec<usize> = (0..bar.arrow_count()).filter(|&h| bar.arrow(h).source == s && bar.arrow(h).target == t).collect();
            match hits.as_slice() {
                [h] => Ok(*h),
                _ => Err(Error::Inconsistent(format!("no unique image of {} under the Nakayama permutation", a.label))),
            }
        })
        .collect()
}

/// Coefficient of `ν(γ)` in the image of `γ`: `−1` when both are starred,
/// `+1` otherwise. Arrows of `Q` come first in the doubled quiver, so `γ` is
/// starred when its index is at least `m = |Q₁|`.
pub fn nakayama_sign(m: usize, g: usize, image: usize) -> Rational {
    if g >= m && image >= m {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// `kΩ/J`: the doubled quiver with arrows `u_i: ν(i) → i` of bidegree
/// `(N(i), 1)`, modulo the preprojective relators and `ω_γ = u_s γ − ν(γ) u_t`, with `ν(γ)`
/// carrying its sign.
#[derive(Clone, Debug)]
pub struct TwistedPolynomialAlgebra {
    pub algebra: GradedQuotientAlgebra,
    pub dynkin: DynkinData,
    /// Index in `Ω` of `u_i`, by vertex.
    pub u_arrows: Vec<usize>,
    pub nu_arrows: Vec<usize>,
    pub rho_count: usize,
}

pub fn build_twisted(q: &Quiver, max_weight: u32) -> Result<TwistedPolynomialAlgebra> {
    let dynkin = nakayama_and_n(q)?;
    let nu_arrows = nakayama_on_arrows(q, &dynkin)?;
    let mut omega = double_quiver(q)?;
    let bar_count = omega.arrow_count();
    let mut u_arrows = Vec::new();
    for i in 0..q.vertex_count() {
        let label = format!("u{}", q.vertex_label(i));
        u_arrows.push(omega.add_arrow(&label, dynkin.nu[i], i, Bidegree::new(dynkin.shift[i], 1))?);
    }
    let mut relators: Vec<PathVector> = (0..q.vertex_count()).map(|i| preprojective_relator(q, i, &omega)).collect();
    for g in 0..bar_count {
        let a = omega.arrow(g).clone();
        let left = Path::from_arrows(&omega, &[u_arrows[a.source], g]).expect("u then arrow");
        let right = Path::from_arrows(&omega, &[nu_arrows[g], u_arrows[a.target]]).expect("arrow then u");
        let w = PathVector::from_terms([(left, Rational::one()), (right, -nakayama_sign(q.arrow_count(), g, nu_arrows[g]))]);
        w.bidegree(&omega)?;
        relators.push(w);
    }
    let algebra = build_quotient(&omega, &relators, max_weight)?;
    Ok(TwistedPolynomialAlgebra { algebra, dynkin, u_arrows, nu_arrows, rho_count: q.vertex_count() })
}

impl TwistedPolynomialAlgebra {
    pub fn quiver(&self) -> &Quiver {
        self.algebra.quiver()
    }

    pub fn relators(&self) -> &[PathVector] {
        self.algebra.relators()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum SliceArrow {
    Mesh(RepArrow),
    /// `u` ending at the given object.
    U(RepVertex),
}

#[derive(Clone, Debug)]
pub struct DynkinU {
    slice: RepetitiveSlice,
    algebra: GradedQuotientAlgebra,
    arrows: Vec<SliceArrow>,
    index: BTreeMap<SliceArrow, usize>,
    dynkin: DynkinData,
}

/// `U_Q = ⊕_n Hom(kQ, τ^{-n} kQ)`: morphisms from level `-n` objects to
/// level `0` objects in the mesh category with `u`-arrows, graded by weight `n`
/// and by the number of `u`-arrows. For quivers that are not Dynkin the
/// degree collapses and `U_Q` is the preprojective algebra.
#[derive(Clone, Debug)]
pub enum TranslationAlgebraU {
    Dynkin(DynkinU),
    Preprojective(GradedQuotientAlgebra),
}

pub fn build_u(q: &Quiver, max_weight: u32) -> Result<TranslationAlgebraU> {
    let frag = knit(q, max_weight as usize)?;
    build_u_from_fragment(&frag, max_weight)
}

pub fn build_u_from_fragment(frag: &MeshFragment, max_weight: u32) -> Result<TranslationAlgebraU> {
    if frag.depth() < max_weight as usize {
        return Err(Error::FragmentTooSmall { required_depth: max_weight as usize });
    }
    let q = frag.quiver();
    if q.dynkin_type().is_none() {
        let lam = preprojective(q, max_weight)?;
        for (key, dim) in lam.block_dims() {
            let predicted = frag.happel_hom_dim(RepVertex::new(key.source, -(key.weight as i32)), RepVertex::new(key.target, 0))?;
            if key.degree != 0 || dim != predicted {
                return Err(Error::Inconsistent(format!("preprojective block {key:?} has dimension {dim}, knitting gives {predicted}")));
            }
        }
        return Ok(TranslationAlgebraU::Preprojective(lam));
    }
    let dynkin = nakayama_and_n(q)?;
    let nu_arrows = nakayama_on_arrows(q, &dynkin)?;
    let lo = -(max_weight as i32);
    let mut slice = RepetitiveSlice::new(q, lo, 0)?;
    let mut arrows: Vec<SliceArrow> = Vec::new();
    let mut index = BTreeMap::new();
    for a in crate::mesh::repetitive_arrows(q, lo, 0) {
        index.insert(SliceArrow::Mesh(a), slice.arrow_index(&a));
    }
    for level in lo..=0 {
        for i in 0..q.vertex_count() {
            let src = level - dynkin.shift[i] as i32;
            if src < lo {
                continue;
            }
            let label = format!("u{}@{level}", q.vertex_label(i));
            let from = slice.index(RepVertex::new(dynkin.nu[i], src));
            let to = slice.index(RepVertex::new(i, level));
            let idx = slice.quiver.add_arrow(&label, from, to, Bidegree::new(dynkin.shift[i], 1))?;
            index.insert(SliceArrow::U(RepVertex::new(i, level)), idx);
        }
    }
    arrows.resize(slice.quiver.arrow_count(), SliceArrow::U(RepVertex::new(0, 0)));
    for (a, &i) in &index {
        arrows[i] = a.clone();
    }
    let m = q.arrow_count();
    let nu_vertex = |x: RepVertex| RepVertex::new(dynkin.nu[x.vertex], x.level - dynkin.shift[x.vertex] as i32);
    let mut relators = slice.relators.clone();
    for a in crate::mesh::repetitive_arrows(q, lo, 0) {
        let (x, y) = (a.source(q), a.target(q));
        let (nx, ny) = (nu_vertex(x), nu_vertex(y));
        if nx.level < lo {
            continue;
        }
        let bar = match a.kind {
            RepArrowKind::Plain => a.arrow,
            RepArrowKind::Star => a.arrow + m,
        };
        let image = nu_arrows[bar];
        let nu_a = if image < m {
            RepArrow { arrow: image, kind: RepArrowKind::Plain, level: nx.level }
        } else {
            RepArrow { arrow: image - m, kind: RepArrowKind::Star, level: nx.level }
        };
        if nu_a.source(q) != nx || nu_a.target(q) != ny {
            return Err(Error::Inconsistent(format!("Nakayama image of {} does not lift to the repetitive quiver", a.label(q))));
        }
        let p = |arrs: &[usize]| Path::from_arrows(&slice.quiver, arrs).expect("composable");
        let ux = index[&SliceArrow::U(x)];
        let uy = index[&SliceArrow::U(y)];
        let left = p(&[ux, index[&SliceArrow::Mesh(a)]]);
        let right = p(&[index[&SliceArrow::Mesh(nu_a)], uy]);
        relators.push(PathVector::from_terms([(left, Rational::one()), (right, -nakayama_sign(m, bar, image))]));
    }
    slice.relators = relators;
    let algebra = build_quotient(&slice.quiver, &slice.relators, max_weight)?;
    Ok(TranslationAlgebraU::Dynkin(DynkinU { slice, algebra, arrows, index, dynkin }))
}

impl DynkinU {
    fn slice_key(&self, key: &BlockKey) -> Option<BlockKey> {
        if key.weight > self.algebra.max_weight() {
            return None;
        }
        let s = self.slice.index(RepVertex::new(key.source, -(key.weight as i32)));
        let t = self.slice.index(RepVertex::new(key.target, 0));
        Some(BlockKey::new(s, t, key.weight, key.degree))
    }

    /// Moves a path down by `k` levels.
    fn shift_path(&self, p: &Path, k: i32) -> Path {
        let moved: Vec<usize> = p
            .arrows
            .iter()
            .map(|&a| {
                let shifted = match &self.arrows[a] {
                    SliceArrow::Mesh(r) => SliceArrow::Mesh(RepArrow { level: r.level - k, ..*r }),
                    SliceArrow::U(x) => SliceArrow::U(RepVertex::new(x.vertex, x.level - k)),
                };
                self.index[&shifted]
            })
            .collect();
        if moved.is_empty() {
            let v = self.slice.vertex(p.source);
            return Path::trivial(self.slice.index(RepVertex::new(v.vertex, v.level - k)));
        }
        Path::from_arrows(&self.slice.quiver, &moved).expect("shifted path")
    }

    /// The path of `u_i` ending at level 0.
    pub fn u_generator(&self, i: usize) -> Option<Element> {
        let a = self.index.get(&SliceArrow::U(RepVertex::new(i, 0)))?;
        let e = self.algebra.element_of_path(&Path::arrow(&self.slice.quiver, *a)).ok()?;
        Some(Element { key: self.u_key(&e.key), coords: e.coords })
    }

    fn u_key(&self, slice_key: &BlockKey) -> BlockKey {
        let s = self.slice.vertex(slice_key.source);
        let t = self.slice.vertex(slice_key.target);
        BlockKey::new(s.vertex, t.vertex, slice_key.weight, slice_key.degree)
    }

    /// The class of a doubled-quiver arrow: `α` at level 0, `α*` from level -1.
    pub fn arrow_generator(&self, q: &Quiver, bar_arrow: usize) -> Option<Element> {
        let m = q.arrow_count();
        let r = if bar_arrow < m {
            RepArrow { arrow: bar_arrow, kind: RepArrowKind::Plain, level: 0 }
        } else {
            RepArrow { arrow: bar_arrow - m, kind: RepArrowKind::Star, level: -1 }
        };
        let a = self.index.get(&SliceArrow::Mesh(r))?;
        let e = self.algebra.element_of_path(&Path::arrow(&self.slice.quiver, *a)).ok()?;
        Some(Element { key: self.u_key(&e.key), coords: e.coords })
    }

    pub fn dynkin(&self) -> &DynkinData {
        &self.dynkin
    }
}

impl BigradedAlgebra for TranslationAlgebraU {
    fn max_weight(&self) -> u32 {
        match self {
            TranslationAlgebraU::Dynkin(u) => u.algebra.max_weight(),
            TranslationAlgebraU::Preprojective(l) => l.max_weight(),
        }
    }

    fn block_dims(&self) -> BTreeMap<BlockKey, usize> {
        match self {
            TranslationAlgebraU::Dynkin(u) => u
                .algebra
                .block_dims()
                .into_iter()
                .filter(|(k, d)| {
                    *d > 0 && u.slice.vertex(k.target).level == 0 && u.slice.vertex(k.source).level == -(k.weight as i32)
                })
                .map(|(k, d)| (u.u_key(&k), d))
                .collect(),
            TranslationAlgebraU::Preprojective(l) => BigradedAlgebra::block_dims(l),
        }
    }

    fn dim(&self, key: &BlockKey) -> usize {
        match self {
            TranslationAlgebraU::Dynkin(u) => u.slice_key(key).map_or(0, |k| u.algebra.dim(&k)),
            TranslationAlgebraU::Preprojective(l) => l.dim(key),
        }
    }

    fn basis_label(&self, key: &BlockKey, k: usize) -> String {
        match self {
            TranslationAlgebraU::Dynkin(u) => u.algebra.basis_label(&u.slice_key(key).expect("inside truncation"), k),
            TranslationAlgebraU::Preprojective(l) => l.basis_label(key, k),
        }
    }

    /// `f · g = τ^{-w(g)}(f) ∘ g`: the left factor is moved down by the weight
    /// of the right factor, then the paths are concatenated.
    fn multiply(&self, x: &Element, y: &Element) -> Result<Option<Element>> {
        let u = match self {
            TranslationAlgebraU::Dynkin(u) => u,
            TranslationAlgebraU::Preprojective(l) => return l.multiply_elements(x, y),
        };
        let Some(key) = x.key.compose(&y.key) else { return Ok(None) };
        if key.weight > u.algebra.max_weight() {
            return Err(Error::TruncationOverflow { weight: key.weight, max_weight: u.algebra.max_weight() });
        }
        let (kx, ky) = (u.slice_key(&x.key).expect("in range"), u.slice_key(&y.key).expect("in range"));
        let px = u.algebra.to_path_vector(&Element { key: kx, coords: x.coords.clone() });
        let py = u.algebra.to_path_vector(&Element { key: ky, coords: y.coords.clone() });
        let mut moved = PathVector::new();
        for (p, c) in px.iter() {
            moved.add_term(u.shift_path(p, y.key.weight as i32), c.clone());
        }
        let prod = moved.concat(&py);
        let target = u.slice_key(&key).expect("in range");
        let mut red = u.algebra.reduce(&prod)?;
        let coords = red.remove(&target).unwrap_or_default();
        if !red.is_empty() {
            return Err(Error::Inconsistent("product left its block".into()));
        }
        Ok(Some(Element { key, coords }))
    }

    fn unit(&self, vertex: usize) -> Option<Element> {
        match self {
            TranslationAlgebraU::Dynkin(u) => {
                let idx = u.slice.index(RepVertex::new(vertex, 0));
                let e = u.algebra.element_of_path(&Path::trivial(idx)).ok()?;
                Some(Element { key: BlockKey::new(vertex, vertex, 0, 0), coords: e.coords })
            }
            TranslationAlgebraU::Preprojective(l) => BigradedAlgebra::unit(l, vertex),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMismatch {
    pub key: BlockKey,
    pub dim_a: usize,
    pub dim_b: usize,
}

#[derive(Clone, Debug, Default)]
pub struct ComparisonReport {
    pub blocks_checked: usize,
    pub mismatches: Vec<BlockMismatch>,
    /// Relators (or `ω` constraints) whose image is nonzero, by label.
    pub relator_failures: Vec<String>,
    /// Blocks on which the generator map is not bijective.
    pub non_bijective: Vec<BlockKey>,
    /// Scalars `λ_i` with `u_i ↦ λ_i s_i`.
    pub lambdas: Vec<Rational>,
    pub hilbert_a: BTreeMap<BlockKey, usize>,
    pub hilbert_b: BTreeMap<BlockKey, usize>,
}

impl ComparisonReport {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty() && self.relator_failures.is_empty() && self.non_bijective.is_empty()
    }
}

/// Block dimensions of `a` and `b` up to `max_weight`, with every disagreeing block.
pub fn compare_hilbert(a: &dyn BigradedAlgebra, b: &dyn BigradedAlgebra, max_weight: u32) -> ComparisonReport {
    let ha: BTreeMap<BlockKey, usize> = a.block_dims().into_iter().filter(|(k, _)| k.weight <= max_weight).collect();
    let hb: BTreeMap<BlockKey, usize> = b.block_dims().into_iter().filter(|(k, _)| k.weight <= max_weight).collect();
    let keys: BTreeSet<BlockKey> = ha.keys().chain(hb.keys()).copied().collect();
    let mut report = ComparisonReport { blocks_checked: keys.len(), ..Default::default() };
    for k in keys {
        let (da, db) = (ha.get(&k).copied().unwrap_or(0), hb.get(&k).copied().unwrap_or(0));
        if da != db {
            report.mismatches.push(BlockMismatch { key: k, dim_a: da, dim_b: db });
        }
    }
    report.hilbert_a = ha;
    report.hilbert_b = hb;
    report
}

/// Images of the generators of `Λ^ν[u]`: doubled-quiver arrows map to fixed
/// elements, `u_i` to a multiple of a fixed element of the same bidegree.
pub struct GeneratorImages {
    pub arrows: Vec<Option<Element>>,
    pub u: Vec<Option<Element>>,
}

fn scaled(e: &Element, c: &Rational) -> Element {
    Element { key: e.key, coords: e.coords.scaled(c) }
}

fn image_of_path(
    target: &dyn BigradedAlgebra,
    imgs: &[Option<Element>],
    p: &Path,
) -> Result<Option<Element>> {
    let mut acc = match p.arrows.first() {
        None => return Ok(target.unit(p.source)),
        Some(&a) => match &imgs[a] {
            Some(e) => e.clone(),
            None => return Ok(None),
        },
    };
    for &a in &p.arrows[1..] {
        let Some(e) = &imgs[a] else { return Ok(None) };
        acc = target.multiply(&acc, e)?.expect("composable");
    }
    Ok(Some(acc))
}

fn image_of_vector(
    target: &dyn BigradedAlgebra,
    imgs: &[Option<Element>],
    v: &PathVector,
) -> Result<Option<SparseVec>> {
    let mut acc = SparseAccumulator::new();
    for (p, c) in v.iter() {
        match image_of_path(target, imgs, p)? {
            Some(e) => acc.add_scaled(c, &e.coords),
            None => return Ok(None),
        }
    }
    Ok(Some(acc.finish()))
}

/// `c` with `x = c y`, if it exists.
fn proportion(x: &SparseVec, y: &SparseVec) -> Option<Rational> {
    let (i, yi) = y.leading()?;
    let c = x.get(i) / yi;
    (x == &y.scaled(&c)).then_some(c)
}

/// Maps the generators of `Λ^ν[u]` into `target`, fixes the scalars of the
/// `u_i` from the `ω` relators, checks every relator maps to zero and that
/// every block of `Λ^ν[u]` maps bijectively onto the matching block of `target`.
pub fn check_generator_map(
    t: &TwistedPolynomialAlgebra,
    target: &dyn BigradedAlgebra,
    images: &GeneratorImages,
    report: &mut ComparisonReport,
) -> Result<()> {
    let omega = t.quiver();
    let n = t.u_arrows.len();
    let bar_count = images.arrows.len();
    let max_weight = t.algebra.max_weight().min(target.max_weight());
    // λ_s u_s γ = ε λ_t ν(γ) u_t, read off with all λ equal to one.
    let mut unit_imgs: Vec<Option<Element>> = images.arrows.clone();
    unit_imgs.extend(images.u.iter().cloned());
    let mut edges: Vec<Vec<(usize, Rational)>> = alloc::vec![Vec::new(); n];
    let mut constraints = Vec::new();
    for g in 0..bar_count {
        let a = omega.arrow(g);
        let (s, tt) = (a.source, a.target);
        let (us, ut) = (t.u_arrows[s], t.u_arrows[tt]);
        if omega.arrow(us).bidegree.weight + a.bidegree.weight > max_weight {
            continue;
        }
        let left = image_of_path(target, &unit_imgs, &Path::from_arrows(omega, &[us, g]).expect("composable"))?;
        let right = image_of_path(target, &unit_imgs, &Path::from_arrows(omega, &[t.nu_arrows[g], ut]).expect("composable"))?;
        let (Some(l), Some(mut r)) = (left, right) else { continue };
        r.coords = r.coords.scaled(&nakayama_sign(bar_count / 2, g, t.nu_arrows[g]));
        let label = format!("omega({})", a.label);
        match (l.is_zero(), r.is_zero()) {
            (true, true) => {}
            (false, false) => match proportion(&r.coords, &l.coords) {
                // λ_s l = λ_t r with r = c l gives λ_t = λ_s / c.
                Some(c) => {
                    edges[s].push((tt, c.recip()));
                    edges[tt].push((s, c.clone()));
                    constraints.push((s, tt, c));
                }
                None => report.relator_failures.push(label),
            },
            _ => report.relator_failures.push(label),
        }
    }
    let mut lambda: Vec<Option<Rational>> = alloc::vec![None; n];
    for start in 0..n {
        if lambda[start].is_some() {
            continue;
        }
        lambda[start] = Some(Rational::one());
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let lv = lambda[v].clone().expect("visited");
            for (w, c) in &edges[v] {
                if lambda[*w].is_none() {
                    lambda[*w] = Some(&lv * c);
                    queue.push_back(*w);
                }
            }
        }
    }
    let lambda: Vec<Rational> = lambda.into_iter().map(|l| l.expect("assigned")).collect();
    for (s, tt, c) in constraints {
        if lambda[tt] != &lambda[s] / &c {
            report.relator_failures.push(format!("inconsistent u scalars at {} and {}", omega.vertex_label(s), omega.vertex_label(tt)));
        }
    }
    let mut imgs: Vec<Option<Element>> = images.arrows.clone();
    for (i, e) in images.u.iter().enumerate() {
        imgs.push(e.as_ref().map(|e| scaled(e, &lambda[i])));
    }
    let names = |k: usize, r: &PathVector| if k < t.rho_count { format!("rho({})", omega.vertex_label(k)) } else { r.label(omega) };
    check_presentation_map(&t.algebra, target, &imgs, &names, report)?;
    report.lambdas = lambda;
    Ok(())
}

/// Given images of the arrows of a quotient algebra's quiver, records every
/// relator with nonzero image and every block not mapped bijectively.
fn check_presentation_map(
    source: &GradedQuotientAlgebra,
    target: &dyn BigradedAlgebra,
    imgs: &[Option<Element>],
    names: &dyn Fn(usize, &PathVector) -> String,
    report: &mut ComparisonReport,
) -> Result<()> {
    let q = source.quiver();
    let max_weight = source.max_weight().min(target.max_weight());
    for (k, r) in source.relators().iter().enumerate() {
        let Some(b) = r.bidegree(q)? else { continue };
        if b.weight > max_weight {
            continue;
        }
        if let Some(v) = image_of_vector(target, imgs, r)? {
            if !v.is_zero() {
                report.relator_failures.push(names(k, r));
            }
        }
    }
    let keys: Vec<BlockKey> = source.block_dims().into_iter().filter(|(k, d)| *d > 0 && k.weight <= max_weight).map(|(k, _)| k).collect();
    let bad = crate::par_map(&keys, |key| -> Result<bool> {
        let block = source.block(key).expect("block");
        let mut e = Echelon::new(target.dim(key));
        for p in block.basis_paths() {
            match image_of_path(target, imgs, p)? {
                Some(img) => {
                    e.insert(&img.coords);
                }
                None => return Ok(true),
            }
        }
        Ok(e.rank() != block.dim() || target.dim(key) != block.dim())
    });
    for (key, b) in keys.iter().zip(bad) {
        if b? {
            report.non_bijective.push(*key);
        }
    }
    Ok(())
}

/// Non-Dynkin case of the homology comparison: `U_Q` is the preprojective
/// algebra, and arrows of the doubled quiver go to their classes in homology.
pub fn compare_homology_with_preprojective(
    table: &AInfinityTable,
    path_class: &dyn Fn(usize) -> Option<Element>,
    pi: &GradedQuotientAlgebra,
    max_weight: u32,
) -> Result<ComparisonReport> {
    let mut report = compare_hilbert(table, pi, max_weight);
    let imgs: Vec<Option<Element>> = (0..pi.quiver().arrow_count()).map(path_class).collect();
    let names = |_: usize, r: &PathVector| r.label(pi.quiver());
    check_presentation_map(pi, table, &imgs, &names, &mut report)?;
    Ok(report)
}

/// Hilbert comparison of `Λ^ν[u]` with `U_Q`, then the generator map sending
/// arrows to their mesh classes and `u_i` to `s_i`.
pub fn compare_twisted_with_u(t: &TwistedPolynomialAlgebra, u: &TranslationAlgebraU, max_weight: u32) -> Result<ComparisonReport> {
    let mut report = compare_hilbert(&t.algebra, u, max_weight);
    let TranslationAlgebraU::Dynkin(du) = u else {
        return Err(Error::NotDynkin);
    };
    let q = original_quiver(t);
    let bar = 2 * q.arrow_count();
    let images = GeneratorImages {
        arrows: (0..bar).map(|g| du.arrow_generator(&q, g)).collect(),
        u: (0..t.u_arrows.len()).map(|i| du.u_generator(i)).collect(),
    };
    check_generator_map(t, u, &images, &mut report)?;
    Ok(report)
}

/// Hilbert comparison of the homology of `Γ_Q` with `U_Q`, then the generator
/// map from `Λ^ν[u]` into homology: arrows to the classes of the same paths of
/// `Γ_Q`, `u_i` to a multiple of the generator of the block `(ν(i) → i, N(i), 1)`.
pub fn compare_homology_with_u(
    table: &AInfinityTable,
    path_class: &dyn Fn(usize) -> Option<Element>,
    t: &TwistedPolynomialAlgebra,
    u: &TranslationAlgebraU,
    max_weight: u32,
) -> Result<ComparisonReport> {
    let mut report = compare_hilbert(table, u, max_weight);
    let bar = t.nu_arrows.len();
    let images = GeneratorImages {
        arrows: (0..bar).map(path_class).collect(),
        u: (0..t.u_arrows.len())
            .map(|i| {
                let key = BlockKey::new(t.dynkin.nu[i], i, t.dynkin.shift[i], 1);
                (table.basis.block_dim(&key) == 1).then(|| Element { key, coords: SparseVec::unit(0) })
            })
            .collect(),
    };
    check_generator_map(t, table, &images, &mut report)?;
    Ok(report)
}

/// Homology classes of the first `count` arrows of the Ginzburg quiver, which
/// are the arrows of the doubled quiver in the same order.
pub fn arrow_classes(c: &BlockComplex, r: &dyn Contraction, count: usize) -> Vec<Option<Element>> {
    (0..count)
        .map(|a| {
            let e = c.algebra().element_of_path(&Path::arrow(c.quiver(), a)).ok()?;
            let coords = r.project(c, &e.key, &e.coords);
            Some(Element { key: e.key, coords })
        })
        .collect()
}

/// The quiver `Q` recovered from `Ω`: the first half of the doubled arrows.
fn original_quiver(t: &TwistedPolynomialAlgebra) -> Quiver {
    let omega = t.quiver();
    let m = t.nu_arrows.len() / 2;
    let mut q = Quiver::new();
    for v in 0..omega.vertex_count() {
        q.add_vertex(omega.vertex_label(v)).expect("distinct labels");
    }
    for a in &omega.arrows()[..m] {
        q.add_arrow(&a.label, a.source, a.target, Bidegree::ZERO).expect("valid arrow");
    }
    q
}

/// The block where a triangle predicts `μ₃` to land, and its generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mu3Prediction {
    pub block: BlockKey,
    pub generator_label: String,
}

/// Recognizes `(x₁, x₂, x₃)`, paths of the doubled quiver `v₀ → v₁ → v₂ → v₃`
/// read as morphisms `f: X → Y`, `g: Y → Z`, `h: Z → X[1]` with `X = P_{v₃}`,
/// `Y = τ^{-w₃} P_{v₂}`, `Z = τ^{-w₂-w₃} P_{v₁}`, as a non-split triangle:
/// `h` must land in `X[1] = τ^{-N(v₃)} P_{ν(v₃)}`, all three maps are nonzero,
/// consecutive composites vanish, and `[Y] = [X] + [Z]` in the Grothendieck group.
/// The prediction is the `u`-class `s_X` at `v₃`.
pub fn mu3_prediction(
    q: &Quiver,
    lam: &GradedQuotientAlgebra,
    frag: &MeshFragment,
    dynkin: &DynkinData,
    triple: [&PathVector; 3],
) -> Result<Mu3Prediction> {
    let bar = lam.quiver();
    let not = |why: &str| Err(Error::NotATriangle(why.into()));
    let mut keys = Vec::new();
    for x in triple {
        let Some(b) = x.bidegree(bar)? else { return not("zero morphism") };
        let (p, _) = x.iter().next().expect("nonzero");
        if x.iter().any(|(r, _)| r.source != p.source || r.target != p.target) {
            return not("morphism not between fixed vertices");
        }
        let key = BlockKey::new(p.source, p.target, b.weight, b.degree);
        if lam.reduce(x)?.is_empty() {
            return not("zero morphism");
        }
        keys.push(key);
    }
    let (k1, k2, k3) = (keys[0], keys[1], keys[2]);
    if k1.target != k2.source || k2.target != k3.source {
        return not("not composable");
    }
    let v3 = k3.target;
    let total = k1.weight + k2.weight + k3.weight;
    if k1.source != dynkin.nu[v3] || total != dynkin.shift[v3] {
        return not("last map does not end at the shifted first object");
    }
    if total > lam.max_weight() {
        return Err(Error::TruncationOverflow { weight: total, max_weight: lam.max_weight() });
    }
    if !lam.multiply(triple[0], triple[1])?.is_zero() || !lam.multiply(triple[1], triple[2])?.is_zero() {
        return not("consecutive composites do not vanish");
    }
    let obj = |v: usize, level: i32| {
        frag.object(RepVertex::new(v, level))
            .cloned()
            .ok_or(Error::FragmentTooSmall { required_depth: (-level) as usize })
    };
    let x = obj(v3, 0)?;
    let y = obj(k3.source, -(k3.weight as i32))?;
    let z = obj(k2.source, -((k3.weight + k2.weight) as i32))?;
    if (0..q.vertex_count()).any(|v| y.class[v] != x.class[v] + z.class[v]) {
        return not("classes are not additive");
    }
    let block = BlockKey::new(dynkin.nu[v3], v3, total, 1);
    Ok(Mu3Prediction { block, generator_label: format!("e{}.u.e{}", q.vertex_label(block.source), q.vertex_label(v3)) })
}

/// Outcome of comparing `μ₃` with `u`-multiplication on both sides.
#[derive(Clone, Debug, Default)]
pub struct EquivarianceReport {
    pub checked: usize,
    pub failures: Vec<(Vec<usize>, &'static str)>,
}

/// For every composable triple within the truncation and each `u`-class `s`
/// that composes on the left or right: `μ₃(s x, y, z) = (−1)^{|s|} s μ₃(x, y, z)`
/// and `μ₃(x, y, z s) = μ₃(x, y, z) s`.
pub fn check_u_equivariance(table: &AInfinityTable, dynkin: &DynkinData) -> Result<EquivarianceReport> {
    let basis: &HomologyBasis = &table.basis;
    let n = dynkin.nu.len();
    let s_class = |i: usize| -> Option<Element> {
        let key = BlockKey::new(dynkin.nu[i], i, dynkin.shift[i], 1);
        (basis.block_dim(&key) == 1).then(|| Element { key, coords: SparseVec::unit(0) })
    };
    let classes: Vec<Option<Element>> = (0..n).map(s_class).collect();
    let mu3 = |x: &Element, y: usize, z: usize| -> SparseVec {
        // Linear in the first slot.
        let mut acc = SparseAccumulator::new();
        for (k, c) in x.coords.iter() {
            let id = basis.id(&x.key, k).expect("basis element");
            if let Some(v) = table.get(&[id, y, z]) {
                acc.add_scaled(c, v);
            }
        }
        acc.finish()
    };
    let mu3_last = |x: usize, y: usize, z: &Element| -> SparseVec {
        let mut acc = SparseAccumulator::new();
        for (k, c) in z.coords.iter() {
            let id = basis.id(&z.key, k).expect("basis element");
            if let Some(v) = table.get(&[x, y, id]) {
                acc.add_scaled(c, v);
            }
        }
        acc.finish()
    };
    let elem = |id: usize| Element { key: basis.key(id), coords: SparseVec::unit(basis.local_index(id)) };
    let global = |e: &Element| basis.globalize(&e.key, &e.coords);
    let as_element = |key: BlockKey, v: &SparseVec| Element { key, coords: basis.localize(&key, v) };
    let firsts: Vec<usize> = (0..basis.len()).collect();
    let parts = crate::par_map(&firsts, |&first| -> Result<(usize, Vec<(Vec<usize>, &'static str)>)> {
        let mut checked = 0;
        let mut failures = Vec::new();
        let tuples = composable_tuples(
            3,
            first,
            table.max_weight,
            &|x| basis.key(x).target,
            &|x| basis.key(x).weight,
            &|v| basis.starting_at(v),
        );
        for t in tuples {
            let (x, y, z) = (t[0], t[1], t[2]);
            let out_key = basis.output_key(&t).expect("composable");
            let m = table.get(&t).cloned().unwrap_or_default();
            if let Some(s) = &classes[basis.key(x).source] {
                if s.key.weight + out_key.weight <= table.max_weight {
                    checked += 1;
                    let sx = table.multiply(s, &elem(x))?.expect("composable");
                    let lhs = mu3(&sx, y, z);
                    let rhs = global(&table.multiply(s, &as_element(out_key, &m))?.expect("composable"));
                    if lhs != rhs.neg() {
                        failures.push((t.clone(), "left"));
                    }
                }
            }
            let j = basis.key(z).target;
            if let Some(s) = &classes[dynkin.nu[j]] {
                if s.key.weight + out_key.weight <= table.max_weight {
                    checked += 1;
                    let zs = table.multiply(&elem(z), s)?.expect("composable");
                    let lhs = mu3_last(x, y, &zs);
                    let rhs = global(&table.multiply(&as_element(out_key, &m), s)?.expect("composable"));
                    if lhs != rhs {
                        failures.push((t.clone(), "right"));
                    }
                }
            }
        }
        Ok((checked, failures))
    });
    let mut report = EquivarianceReport::default();
    for p in parts {
        let (c, f) = p?;
        report.checked += c;
        report.failures.extend(f);
    }
    Ok(report)
}

/// Sparse affine expression in the unknown values of `F`, per output id;
/// the constant term sits in the column after the last unknown.
type Affine = BTreeMap<(usize, usize), Rational>;

fn add_term(e: &mut Affine, out: usize, col: usize, c: Rational) {
    if c.is_zero() {
        return;
    }
    let slot = e.entry((out, col)).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        e.remove(&(out, col));
    }
}

struct GaugeSystem<'a> {
    table: &'a AInfinityTable,
    /// For each pair of ids, the unknowns `(output id, column)` of `F` on it.
    unknowns: BTreeMap<(usize, usize), Vec<(usize, usize)>>,
    count: usize,
}

impl<'a> GaugeSystem<'a> {
    /// One unknown per output coordinate of `F` on every composable pair
    /// without an idempotent, so strict units survive the change.
    fn new(table: &'a AInfinityTable) -> Self {
        let b = &table.basis;
        let is_unit = |x: usize| {
            let k = b.key(x);
            k.source == k.target && k.weight == 0 && k.degree == 0
        };
        let mut unknowns = BTreeMap::new();
        let mut count = 0;
        for x in 0..b.len() {
            if is_unit(x) {
                continue;
            }
            for &y in b.starting_at(b.key(x).target) {
                if is_unit(y) {
                    continue;
                }
                let key = b.key(x).compose(&b.key(y)).expect("composable");
                let key = key.with_degree(key.degree + 1);
                if key.weight > table.max_weight || b.block_dim(&key) == 0 {
                    continue;
                }
                let cols: Vec<(usize, usize)> = b.block_ids(&key).map(|o| (o, count + o - b.block_ids(&key).start)).collect();
                count += cols.len();
                unknowns.insert((x, y), cols);
            }
        }
        GaugeSystem { table, unknowns, count }
    }

    fn mu2(&self, x: usize, y: usize) -> SparseVec {
        self.table.get(&[x, y]).cloned().unwrap_or_default()
    }

    fn f(&self, x: usize, y: usize) -> &[(usize, usize)] {
        self.unknowns.get(&(x, y)).map_or(&[], Vec::as_slice)
    }

    /// Adds `c μ'_3(x, y, z)` where `μ'_3 = μ_3 + (−1)^{|x|} μ_2(x, F(y, z)) − μ_2(F(x, y), z) − F(μ_2(x, y), z) + F(x, μ_2(y, z))`.
    fn mu3(&self, e: &mut Affine, c: &Rational, x: usize, y: usize, z: usize) {
        let konst = self.count;
        if let Some(v) = self.table.get(&[x, y, z]) {
            for (o, a) in v.iter() {
                add_term(e, o, konst, c * a);
            }
        }
        let sx = if self.table.basis.key(x).degree % 2 == 0 { c.clone() } else { -c.clone() };
        for &(k, col) in self.f(y, z) {
            for (o, a) in self.mu2(x, k).iter() {
                add_term(e, o, col, &sx * a);
            }
        }
        for &(k, col) in self.f(x, y) {
            for (o, a) in self.mu2(k, z).iter() {
                add_term(e, o, col, -(c * a));
            }
        }
        for (m, a) in self.mu2(x, y).iter() {
            for &(k, col) in self.f(m, z) {
                add_term(e, k, col, -(c * a));
            }
        }
        for (m, a) in self.mu2(y, z).iter() {
            for &(k, col) in self.f(x, m) {
                add_term(e, k, col, c * a);
            }
        }
    }

    /// `s · e` or `e · s` on every output coordinate.
    fn times(&self, e: &Affine, s: usize, left: bool, out: &mut Affine) {
        for (&(o, col), a) in e {
            let v = if left { self.mu2(s, o) } else { self.mu2(o, s) };
            for (p, b) in v.iter() {
                add_term(out, p, col, a * b);
            }
        }
    }

    fn gauge(&self, x: &[Rational]) -> Gauge {
        let mut f = Gauge::new(2);
        for (pair, cols) in &self.unknowns {
            let v = SparseVec::from_entries(cols.iter().map(|&(o, col)| (o, x[col].clone())).collect());
            if !v.is_zero() {
                f.map.insert(alloc::vec![pair.0, pair.1], v);
            }
        }
        f
    }
}

/// The `u`-class `s_i`: the generator of the block `(ν(i) → i, N(i), 1)`.
fn u_classes(basis: &HomologyBasis, dynkin: &DynkinData) -> Vec<Option<usize>> {
    (0..dynkin.nu.len())
        .map(|i| {
            let key = BlockKey::new(dynkin.nu[i], i, dynkin.shift[i], 1);
            (basis.block_dim(&key) == 1).then(|| basis.block_ids(&key).start)
        })
        .collect()
}

/// A minimal model A∞-isomorphic to `table` through `(id, F)` whose `μ₃`
/// commutes with `u` on both sides, found by solving the linear conditions on `F`.
/// Errors if no such `F` exists within the truncation.
pub fn equivariant_model(table: &AInfinityTable, dynkin: &DynkinData) -> Result<(AInfinityTable, Gauge)> {
    let sys = GaugeSystem::new(table);
    let basis = &table.basis;
    let classes = u_classes(basis, dynkin);
    let firsts: Vec<usize> = (0..basis.len()).collect();
    let parts = crate::par_map(&firsts, |&first| {
        let mut rows = Vec::new();
        let tuples = composable_tuples(
            3,
            first,
            table.max_weight,
            &|x| basis.key(x).target,
            &|x| basis.key(x).weight,
            &|v| basis.starting_at(v),
        );
        for t in tuples {
            let (x, y, z) = (t[0], t[1], t[2]);
            let out_weight = basis.output_key(&t).expect("composable").weight;
            let one = Rational::one();
            if let Some(s) = classes[basis.key(x).source] {
                if basis.key(s).weight + out_weight <= table.max_weight {
                    // μ'(s x, y, z) + s μ'(x, y, z) = 0
                    let mut e = Affine::new();
                    for (m, a) in sys.mu2(s, x).iter() {
                        sys.mu3(&mut e, a, m, y, z);
                    }
                    let mut inner = Affine::new();
                    sys.mu3(&mut inner, &one, x, y, z);
                    sys.times(&inner, s, true, &mut e);
                    rows.push(e);
                }
            }
            if let Some(s) = classes[dynkin.nu[basis.key(z).target]] {
                if basis.key(s).weight + out_weight <= table.max_weight {
                    // μ'(x, y, z s) − μ'(x, y, z) s = 0
                    let mut e = Affine::new();
                    for (m, a) in sys.mu2(z, s).iter() {
                        sys.mu3(&mut e, a, x, y, m);
                    }
                    let mut inner = Affine::new();
                    sys.mu3(&mut inner, &-one.clone(), x, y, z);
                    sys.times(&inner, s, false, &mut e);
                    rows.push(e);
                }
            }
        }
        rows
    });
    let mut equations = Vec::new();
    for e in parts.into_iter().flatten() {
        let mut by_out: BTreeMap<usize, (Vec<(usize, Rational)>, Rational)> = BTreeMap::new();
        for ((o, col), a) in e {
            let slot = by_out.entry(o).or_insert_with(|| (Vec::new(), Rational::zero()));
            if col == sys.count {
                slot.1 = -a;
            } else {
                slot.0.push((col, a));
            }
        }
        for (_, (row, rhs)) in by_out {
            equations.push((SparseVec::from_entries(row), rhs));
        }
    }
    let x = solve_sparse(&equations, sys.count)
        .ok_or_else(|| Error::Inconsistent("no binary gauge makes mu_3 commute with u".into()))?;
    let f = sys.gauge(&x);
    Ok((apply_gauge(table, &f), f))
}

/// A minimal model reached from a transferred one by A∞-isomorphisms with
/// identity linear part.
#[derive(Clone, Debug)]
pub struct NormalizedModel {
    pub table: AInfinityTable,
    /// Components applied in order: arity two first.
    pub gauges: Vec<Gauge>,
    /// Arities `n >= 4` whose `μ_n` could not be removed.
    pub obstructed: Vec<usize>,
}

/// Makes `μ₃` commute with `u`, then tries to remove `μ_n` for
/// `4 <= n <= n_max` one arity at a time; each step leaves lower arities
/// unchanged. Arities where no component `f_{n−1}` works are recorded.
pub fn normalize_dynkin_model(table: &AInfinityTable, dynkin: &DynkinData) -> Result<NormalizedModel> {
    let (mut current, f2) = equivariant_model(table, dynkin)?;
    let mut gauges = alloc::vec![f2];
    let mut obstructed = Vec::new();
    for k in 3..table.n_max {
        match crate::transfer::kill_arity(&current, k) {
            Some((next, g)) => {
                current = next;
                gauges.push(g);
            }
            None => obstructed.push(k + 1),
        }
    }
    Ok(NormalizedModel { table: current, gauges, obstructed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ginzburg::{build_ginzburg, truncate_dg};
    use crate::transfer::{homology_and_retraction, transfer};

    fn a2() -> Quiver {
        Quiver::from_edges(&["1", "2"], &[("a", "2", "1")]).unwrap()
    }

    fn a3() -> Quiver {
        Quiver::from_edges(&["1", "2", "3"], &[("b", "3", "2"), ("a", "2", "1")]).unwrap()
    }

    fn d4() -> Quiver {
        Quiver::from_edges(&["0", "1", "2", "3"], &[("a", "1", "0"), ("b", "2", "0"), ("c", "3", "0")]).unwrap()
    }

    #[test]
    fn twisted_matches_u() {
        for q in [a2(), a3(), d4()] {
            let t = build_twisted(&q, 4).unwrap();
            let u = build_u(&q, 4).unwrap();
            let r = compare_twisted_with_u(&t, &u, 4).unwrap();
            assert!(r.is_ok(), "{:?} {:?} {:?}", r.mismatches, r.relator_failures, r.non_bijective);
            assert!(r.blocks_checked > 0);
        }
    }

    #[test]
    fn a2_u_blocks() {
        // Degree-zero blocks against Happel's hom dimensions on the knitted fragment.
        let q = a2();
        let u = build_u(&q, 3).unwrap();
        let frag = knit(&q, 3).unwrap();
        for (key, dim) in u.block_dims() {
            if key.degree == 0 {
                let want = frag.happel_hom_dim(RepVertex::new(key.source, -(key.weight as i32)), RepVertex::new(key.target, 0)).unwrap();
                assert_eq!(dim, want, "{key:?}");
            }
        }
        // u_i lives in (ν(i) → i, N(i), 1).
        for i in 0..2 {
            let d = nakayama_and_n(&q).unwrap();
            assert_eq!(u.dim(&BlockKey::new(d.nu[i], i, d.shift[i], 1)), 1);
        }
    }

    fn a4_alternating() -> Quiver {
        Quiver::from_edges(&["1", "2", "3", "4"], &[("a", "1", "2"), ("b", "3", "2"), ("c", "3", "4")]).unwrap()
    }

    fn d5() -> Quiver {
        Quiver::from_edges(&["1", "2", "3", "4", "5"], &[("a", "2", "1"), ("b", "3", "2"), ("c", "4", "3"), ("d", "5", "3")]).unwrap()
    }

    fn e6() -> Quiver {
        Quiver::from_edges(
            &["1", "2", "3", "4", "5", "6"],
            &[("a", "1", "2"), ("b", "2", "3"), ("c", "4", "3"), ("d", "5", "4"), ("e", "6", "3")],
        )
        .unwrap()
    }

    /// `γ ↦ ε(γ) ν(γ)` on a path vector of the doubled quiver.
    fn apply_nu(q: &Quiver, bar: &Quiver, v: &PathVector) -> PathVector {
        let d = nakayama_and_n(q).unwrap();
        let nu = nakayama_on_arrows(q, &d).unwrap();
        let m = q.arrow_count();
        PathVector::from_terms(v.iter().map(|(p, c)| {
            let mut coef = c.clone();
            let arrows: Vec<usize> = p
                .arrows
                .iter()
                .map(|&g| {
                    coef *= nakayama_sign(m, g, nu[g]);
                    nu[g]
                })
                .collect();
            (Path::from_arrows(bar, &arrows).unwrap(), coef)
        }))
    }

    #[test]
    fn signed_nakayama_preserves_relators() {
        for q in [a2(), a3(), a4_alternating(), d4(), d5(), e6()] {
            let d = nakayama_and_n(&q).unwrap();
            let bar = double_quiver(&q).unwrap();
            for i in 0..q.vertex_count() {
                let image = apply_nu(&q, &bar, &preprojective_relator(&q, i, &bar));
                let target = preprojective_relator(&q, d.nu[i], &bar);
                assert!(image == target || image == target.scaled(&-Rational::one()), "{:?} at {i}", q.dynkin_type());
            }
        }
    }

    #[test]
    fn homology_matches_u() {
        for q in [a2(), a3(), d4()] {
            let w = 4;
            let g = build_ginzburg(&q).unwrap();
            let c = truncate_dg(&g, w).unwrap();
            let r = homology_and_retraction(&c).unwrap();
            let table = transfer(&c, &r, 2).unwrap();
            let t = build_twisted(&q, w).unwrap();
            let u = build_u(&q, w).unwrap();
            let classes = arrow_classes(&c, &r, 2 * q.arrow_count());
            let rep = compare_homology_with_u(&table, &|a| classes[a].clone(), &t, &u, w).unwrap();
            assert!(rep.is_ok(), "{:?} {:?} {:?}", rep.mismatches, rep.relator_failures, rep.non_bijective);
        }
    }

    #[test]
    fn homology_matches_u_beyond_fixtures() {
        for (q, w) in [(a4_alternating(), 5), (d5(), 5)] {
            let d = nakayama_and_n(&q).unwrap();
            assert!(d.shift.iter().all(|&n| n < w), "truncation must see every ω relator");
            let g = build_ginzburg(&q).unwrap();
            let c = truncate_dg(&g, w).unwrap();
            let r = homology_and_retraction(&c).unwrap();
            let table = transfer(&c, &r, 2).unwrap();
            let t = build_twisted(&q, w).unwrap();
            let u = build_u(&q, w).unwrap();
            let classes = arrow_classes(&c, &r, 2 * q.arrow_count());
            let rep = compare_homology_with_u(&table, &|a| classes[a].clone(), &t, &u, w).unwrap();
            assert!(rep.is_ok(), "{:?}: {:?} {:?} {:?}", q.dynkin_type(), rep.mismatches, rep.relator_failures, rep.non_bijective);
            let rep = compare_twisted_with_u(&t, &u, w).unwrap();
            assert!(rep.is_ok(), "{:?}: {:?} {:?} {:?}", q.dynkin_type(), rep.mismatches, rep.relator_failures, rep.non_bijective);
        }
    }

    #[test]
    fn kronecker_homology_is_preprojective() {
        let q = Quiver::from_edges(&["1", "2"], &[("a", "2", "1"), ("b", "2", "1")]).unwrap();
        let w = 4;
        let g = build_ginzburg(&q).unwrap();
        let c = truncate_dg(&g, w).unwrap();
        let r = homology_and_retraction(&c).unwrap();
        let table = transfer(&c, &r, 2).unwrap();
        let TranslationAlgebraU::Preprojective(pi) = build_u(&q, w).unwrap() else { panic!("Kronecker is not Dynkin") };
        let classes = arrow_classes(&c, &r, 2 * q.arrow_count());
        let rep = compare_homology_with_preprojective(&table, &|a| classes[a].clone(), &pi, w).unwrap();
        assert!(rep.is_ok(), "{:?} {:?} {:?}", rep.mismatches, rep.relator_failures, rep.non_bijective);
        assert!(rep.hilbert_a.keys().all(|k| k.degree == 0));
    }

    #[test]
    fn mu3_predictions_on_a3() {
        let q = a3();
        let w = 3;
        let lam = preprojective(&q, w).unwrap();
        let frag = knit(&q, w as usize + 1).unwrap();
        let d = nakayama_and_n(&q).unwrap();
        let pv = |s: &str| {
            let p = Path::parse(lam.quiver(), s).unwrap();
            PathVector::from_terms([(p, Rational::one())])
        };
        let cases = [
            (["b.a", "a*", "a"], BlockKey::new(2, 0, 1, 1)),
            (["a", "a*.b*", "b"], BlockKey::new(1, 1, 2, 1)),
            (["a*", "a", "a*.b*"], BlockKey::new(0, 2, 3, 1)),
        ];
        let g = build_ginzburg(&q).unwrap();
        let c = truncate_dg(&g, w).unwrap();
        let r = homology_and_retraction(&c).unwrap();
        let table = transfer(&c, &r, 3).unwrap();
        for (paths, block) in cases {
            let xs: Vec<PathVector> = paths.iter().map(|s| pv(s)).collect();
            let pred = mu3_prediction(&q, &lam, &frag, &d, [&xs[0], &xs[1], &xs[2]]).unwrap();
            assert_eq!(pred.block, block);
            let ids: Vec<usize> = xs
                .iter()
                .map(|x| {
                    let (p, _) = x.iter().next().unwrap();
                    table.basis.id_of_label(&p.label(lam.quiver())).unwrap()
                })
                .collect();
            let out = table.get(&ids).expect("nonzero μ₃");
            assert!(out.iter().all(|(id, _)| table.basis.key(id) == block));
        }
    }

    #[test]
    fn split_triples_are_rejected() {
        let q = a3();
        let lam = preprojective(&q, 3).unwrap();
        let frag = knit(&q, 4).unwrap();
        let d = nakayama_and_n(&q).unwrap();
        let pv = |s: &str| PathVector::from_terms([(Path::parse(lam.quiver(), s).unwrap(), Rational::one())]);
        let (x, y, z) = (pv("a*"), pv("a"), pv("a*"));
        assert!(matches!(mu3_prediction(&q, &lam, &frag, &d, [&x, &y, &z]), Err(Error::NotATriangle(_))));
    }

    #[test]
    fn fragment_must_cover_weights() {
        let frag = knit(&a2(), 2).unwrap();
        assert!(matches!(build_u_from_fragment(&frag, 4), Err(Error::FragmentTooSmall { required_depth: 4 })));
    }

    #[test]
    fn a3_gauge_restores_equivariance() {
        let q = a3();
        let w = 4;
        let g = build_ginzburg(&q).unwrap();
        let c = truncate_dg(&g, w).unwrap();
        let r = homology_and_retraction(&c).unwrap();
        let table = transfer(&c, &r, 6).unwrap();
        let d = nakayama_and_n(&q).unwrap();
        let raw = check_u_equivariance(&table, &d).unwrap();
        assert!(!raw.failures.is_empty());
        let model = normalize_dynkin_model(&table, &d).unwrap();
        assert!(!model.gauges[0].is_empty());
        let fixed = model.table;
        let rep = check_u_equivariance(&fixed, &d).unwrap();
        assert_eq!(rep.checked, raw.checked);
        assert!(rep.failures.is_empty(), "{} failures", rep.failures.len());
        assert!(crate::transfer::check_ainf_relations(&fixed, 6).is_ok());
        // μ₄(a*.b*, b.a, a*.b*, b.a) lands in the block of s₃·s₁ at vertex 1 and
        // survives every gauge; the higher arities are clear.
        assert_eq!(model.obstructed, [4]);
        let x = fixed.basis.id_of_label("a*.b*").unwrap();
        let y = fixed.basis.id_of_label("b.a").unwrap();
        assert!(fixed.get(&[x, y, x, y]).is_some());
        assert_eq!(fixed.count(4), 2);
        assert_eq!(fixed.count(5) + fixed.count(6), 0);
    }
}
