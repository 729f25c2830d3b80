//! The repetitive quiver, knitting in the Grothendieck group, and the mesh category.
//!
//! Level `n` of the repetitive quiver carries a copy of `Q₀`; `τ(i, n) = (i, n + 1)`.
//! Arrows never lower the level and a path `x → y` is a morphism from `y` to `x`
//! under Happel's embedding, so `(i, -k)` is the object `τ^{-k} P_i`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use crate::algebra::{build_quotient, GradedQuotientAlgebra, PathVector};
use crate::error::{Error, Result};
use crate::quiver::{BlockKey, Bidegree, Path, Quiver};

/// Knitting refuses to go deeper than this for quivers that are not Dynkin.
pub const MAX_NON_DYNKIN_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RepVertex {
    pub vertex: usize,
    pub level: i32,
}

impl RepVertex {
    pub fn new(vertex: usize, level: i32) -> Self {
        Self { vertex, level }
    }

    pub fn tau(self) -> Self {
        Self { level: self.level + 1, ..self }
    }

    pub fn tau_inverse(self) -> Self {
        Self { level: self.level - 1, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RepArrowKind {
    /// `(α, n): (i, n) → (j, n)` for `α: i → j`.
    Plain,
    /// `(α*, n): (j, n) → (i, n + 1)` for `α: i → j`.
    Star,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RepArrow {
    pub arrow: usize,
    pub kind: RepArrowKind,
    pub level: i32,
}

impl RepArrow {
    pub fn source(&self, q: &Quiver) -> RepVertex {
        let a = q.arrow(self.arrow);
        match self.kind {
            RepArrowKind::Plain => RepVertex::new(a.source, self.level),
            RepArrowKind::Star => RepVertex::new(a.target, self.level),
        }
    }

    pub fn target(&self, q: &Quiver) -> RepVertex {
        let a = q.arrow(self.arrow);
        match self.kind {
            RepArrowKind::Plain => RepVertex::new(a.target, self.level),
            RepArrowKind::Star => RepVertex::new(a.source, self.level + 1),
        }
    }

    pub fn bidegree(&self) -> Bidegree {
        match self.kind {
            RepArrowKind::Plain => Bidegree::new(0, 0),
            RepArrowKind::Star => Bidegree::new(1, 0),
        }
    }

    /// For `γ: x → y`, the arrow `σγ: y → τx` completing the mesh that starts at `x`.
    pub fn sigma(&self) -> RepArrow {
        match self.kind {
            RepArrowKind::Plain => RepArrow { kind: RepArrowKind::Star, ..*self },
            RepArrowKind::Star => RepArrow { kind: RepArrowKind::Plain, level: self.level + 1, ..*self },
        }
    }

    pub fn label(&self, q: &Quiver) -> String {
        let a = &q.arrow(self.arrow).label;
        match self.kind {
            RepArrowKind::Plain => format!("{a}@{}", self.level),
            RepArrowKind::Star => format!("{a}*@{}", self.level),
        }
    }
}

/// All repetitive arrows with both ends at levels in `lo..=hi`.
pub fn repetitive_arrows(q: &Quiver, lo: i32, hi: i32) -> Vec<RepArrow> {
    let mut out = Vec::new();
    for level in lo..=hi {
        for a in 0..q.arrow_count() {
            out.push(RepArrow { arrow: a, kind: RepArrowKind::Plain, level });
            if level < hi {
                out.push(RepArrow { arrow: a, kind: RepArrowKind::Star, level });
            }
        }
    }
    out
}

/// A knitted object: its class in the Grothendieck group and the number of
/// suspensions separating it from a module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnitObject {
    pub position: RepVertex,
    pub class: Vec<i64>,
    pub shift: u32,
}

impl KnitObject {
    pub fn dimension_vector(&self) -> Vec<i64> {
        self.class.iter().map(|c| c.abs()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct MeshFragment {
    quiver: Quiver,
    depth: usize,
    objects: BTreeMap<RepVertex, KnitObject>,
}

/// Dimension vector of `P_i`: the number of paths from `i` to each vertex.
pub fn projective_dims(q: &Quiver) -> Result<Vec<Vec<i64>>> {
    let order = q.topological_sort()?;
    let n = q.vertex_count();
    let mut dims = alloc::vec![alloc::vec![0i64; n]; n];
    for &i in order.iter().rev() {
        dims[i][i] = 1;
        for a in q.arrows().iter().filter(|a| a.source == i) {
            let (row, t) = (i, a.target);
            for v in 0..n {
                let x = dims[t][v];
                dims[row][v] = dims[row][v].checked_add(x).ok_or_else(overflow)?;
            }
        }
    }
    Ok(dims)
}

fn overflow() -> Error {
    Error::InvalidArgument("dimension vector overflow while knitting".into())
}

fn sign_of(class: &[i64]) -> i32 {
    if class.iter().all(|&c| c >= 0) {
        1
    } else if class.iter().all(|&c| c <= 0) {
        -1
    } else {
        0
    }
}

/// Levels `0, -1, ..., -depth` from the mesh identity
/// `c(i, n - 1) + c(i, n) = Σ_{α: i → j} c(j, n - 1) + Σ_{β: k → i} c(k, n)`,
/// starting from the projectives at level 0.
pub fn knit(q: &Quiver, depth: usize) -> Result<MeshFragment> {
    if !q.is_acyclic() {
        return Err(Error::NotAcyclic);
    }
    if depth > MAX_NON_DYNKIN_DEPTH && q.dynkin_type().is_none() {
        return Err(Error::InvalidArgument(format!(
            "knitting depth {depth} exceeds {MAX_NON_DYNKIN_DEPTH} for a non-Dynkin quiver"
        )));
    }
    let n = q.vertex_count();
    let order = q.topological_sort()?;
    let mut objects = BTreeMap::new();
    let mut prev = projective_dims(q)?;
    for (i, c) in prev.iter().enumerate() {
        objects.insert(RepVertex::new(i, 0), KnitObject { position: RepVertex::new(i, 0), class: c.clone(), shift: 0 });
    }
    for step in 1..=depth {
        let level = -(step as i32);
        let mut cur: Vec<Option<Vec<i64>>> = alloc::vec![None; n];
        // Sinks first: c(i, n - 1) needs c(j, n - 1) for every arrow i → j.
        for &i in order.iter().rev() {
            let mut c: Vec<i64> = prev[i].iter().map(|x| -x).collect();
            for a in q.arrows() {
                let add = if a.source == i {
                    cur[a.target].as_ref().expect("targets come first")
                } else if a.target == i {
                    &prev[a.source]
                } else {
                    continue;
                };
                for v in 0..n {
                    c[v] = c[v].checked_add(add[v]).ok_or_else(overflow)?;
                }
            }
            cur[i] = Some(c);
        }
        let cur: Vec<Vec<i64>> = cur.into_iter().map(|c| c.expect("all vertices knitted")).collect();
        for (i, c) in cur.iter().enumerate() {
            let above = &objects[&RepVertex::new(i, level + 1)];
            let (s_above, s_here) = (sign_of(&above.class), sign_of(c));
            if s_here == 0 || c.iter().all(|&x| x == 0) {
                return Err(Error::Inconsistent(format!("knitted class at ({i}, {level}) is not of one sign")));
            }
            let shift = above.shift + u32::from(s_above != s_here);
            let pos = RepVertex::new(i, level);
            objects.insert(pos, KnitObject { position: pos, class: c.clone(), shift });
        }
        prev = cur;
    }
    Ok(MeshFragment { quiver: q.clone(), depth, objects })
}

impl MeshFragment {
    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn object(&self, x: RepVertex) -> Option<&KnitObject> {
        self.objects.get(&x)
    }

    /// Objects by vertex, then from level 0 downwards.
    pub fn objects(&self) -> impl Iterator<Item = &KnitObject> {
        let mut v: Vec<&KnitObject> = self.objects.values().collect();
        v.sort_by_key(|o| (o.position.vertex, -o.position.level));
        v.into_iter()
    }

    pub fn unshifted(&self) -> impl Iterator<Item = &KnitObject> {
        self.objects().filter(|o| o.shift == 0)
    }

    /// The modules together with the first shifted object on each `τ`-orbit.
    pub fn fundamental_domain(&self) -> Vec<&KnitObject> {
        self.objects()
            .filter(|o| {
                o.shift == 0 || (o.shift == 1 && self.objects.get(&o.position.tau()).is_some_and(|p| p.shift == 0))
            })
            .collect()
    }

    pub fn arrows(&self) -> Vec<RepArrow> {
        repetitive_arrows(&self.quiver, -(self.depth as i32), 0)
    }

    /// The mesh identity holds at every knitted mesh.
    pub fn verify_additivity(&self) -> Result<()> {
        let q = &self.quiver;
        for level in -(self.depth as i32) + 1..=0 {
            for i in 0..q.vertex_count() {
                let mut lhs: Vec<i64> = self.objects[&RepVertex::new(i, level)].class.clone();
                for (v, x) in self.objects[&RepVertex::new(i, level - 1)].class.iter().enumerate() {
                    lhs[v] += x;
                }
                let mut rhs = alloc::vec![0i64; q.vertex_count()];
                for a in q.arrows() {
                    let mid = if a.source == i {
                        RepVertex::new(a.target, level - 1)
                    } else if a.target == i {
                        RepVertex::new(a.source, level)
                    } else {
                        continue;
                    };
                    for (v, x) in self.objects[&mid].class.iter().enumerate() {
                        rhs[v] += x;
                    }
                }
                if lhs != rhs {
                    return Err(Error::Inconsistent(format!("mesh additivity fails at ({i}, {level})")));
                }
            }
        }
        Ok(())
    }

    /// `dim Hom(h(y), h(x))` predicted from the knitted classes, for paths `x → y`:
    /// by `τ`-stability this is `Hom(P_b, τ^{-k} P_a)`, which is the `b`-th entry
    /// of the class when the object is a module and zero once it is shifted.
    pub fn happel_hom_dim(&self, x: RepVertex, y: RepVertex) -> Result<usize> {
        if x.level > y.level {
            return Ok(0);
        }
        let pos = RepVertex::new(x.vertex, x.level - y.level);
        let o = self.objects.get(&pos).ok_or_else(|| out_of_fragment(pos))?;
        Ok(if o.shift == 0 { o.class[y.vertex] as usize } else { 0 })
    }
}

fn out_of_fragment(x: RepVertex) -> Error {
    Error::InvalidArgument(format!("({}, {}) lies outside the knitted fragment", x.vertex, x.level))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynkinData {
    pub nu: Vec<usize>,
    /// `τ^{-N(i)} P_{ν(i)} = P_i[1]`.
    pub shift: Vec<u32>,
    pub coxeter_number: usize,
}

/// Reads `ν` and `N` off the first shifted object of each `τ`-orbit.
pub fn nakayama_and_n(q: &Quiver) -> Result<DynkinData> {
    let ty = q.dynkin_type().ok_or(Error::NotDynkin)?;
    let h = ty.coxeter_number();
    let frag = knit(q, h)?;
    let proj = projective_dims(q)?;
    let n = q.vertex_count();
    let mut nu = alloc::vec![usize::MAX; n];
    let mut shift = alloc::vec![0u32; n];
    for v in 0..n {
        let first = (1..=h as i32)
            .map(|k| &frag.objects[&RepVertex::new(v, -k)])
            .find(|o| o.shift == 1)
            .ok_or_else(|| Error::Inconsistent(format!("no shift within {h} steps at vertex {v}")))?;
        let neg: Vec<i64> = first.class.iter().map(|x| -x).collect();
        let i = proj
            .iter()
            .position(|p| *p == neg)
            .ok_or_else(|| Error::Inconsistent("first shifted object is not a shifted projective".into()))?;
        if nu[i] != usize::MAX {
            return Err(Error::Inconsistent("two orbits end at the same shifted projective".into()));
        }
        nu[i] = v;
        shift[i] = (-first.position.level) as u32;
    }
    if (0..n).any(|i| nu[nu[i]] != i) {
        return Err(Error::Inconsistent("the Nakayama permutation is not an involution".into()));
    }
    Ok(DynkinData { nu, shift, coxeter_number: h })
}

/// The full subquiver of the repetitive quiver on levels `lo..=hi`, with the
/// mesh relators of every mesh inside it.
#[derive(Clone, Debug)]
pub struct RepetitiveSlice {
    pub lo: i32,
    pub hi: i32,
    pub quiver: Quiver,
    pub relators: Vec<PathVector>,
    base: Quiver,
}

impl RepetitiveSlice {
    pub fn new(q: &Quiver, lo: i32, hi: i32) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument("empty level range".into()));
        }
        let n = q.vertex_count();
        let mut s = Quiver::new();
        for level in lo..=hi {
            for v in 0..n {
                s.add_vertex(&format!("{}@{level}", q.vertex_label(v)))?;
            }
        }
        let mut slice = RepetitiveSlice { lo, hi, quiver: s, relators: Vec::new(), base: q.clone() };
        for a in repetitive_arrows(q, lo, hi) {
            let (src, tgt) = (slice.index(a.source(q)), slice.index(a.target(q)));
            slice.quiver.add_arrow(&a.label(q), src, tgt, a.bidegree())?;
        }
        for level in lo..hi {
            for i in 0..n {
                let r = slice.mesh_relator(RepVertex::new(i, level));
                slice.relators.push(r);
            }
        }
        Ok(slice)
    }

    pub fn index(&self, x: RepVertex) -> usize {
        (x.level - self.lo) as usize * self.base.vertex_count() + x.vertex
    }

    pub fn vertex(&self, idx: usize) -> RepVertex {
        let n = self.base.vertex_count();
        RepVertex::new(idx % n, self.lo + (idx / n) as i32)
    }

    pub fn arrow_index(&self, a: &RepArrow) -> usize {
        self.quiver.arrow_index(&a.label(&self.base)).expect("arrow inside the slice")
    }

    /// `Σ_{α: i → j} (α, n)(α*, n) − Σ_{β: k → i} (β*, n)(β, n + 1)`, paths from `x` to `τx`.
    pub fn mesh_relator(&self, x: RepVertex) -> PathVector {
        let q = &self.base;
        let mut r = PathVector::new();
        for (a, arr) in q.arrows().iter().enumerate() {
            let (first, coef) = if arr.source == x.vertex {
                (RepArrow { arrow: a, kind: RepArrowKind::Plain, level: x.level }, crate::Rational::one())
            } else if arr.target == x.vertex {
                (RepArrow { arrow: a, kind: RepArrowKind::Star, level: x.level }, -crate::Rational::one())
            } else {
                continue;
            };
            let p = Path::from_arrows(&self.quiver, &[self.arrow_index(&first), self.arrow_index(&first.sigma())])
                .expect("mesh paths compose");
            r.add_term(p, coef);
        }
        r
    }

    /// The mesh category restricted to the slice.
    pub fn mesh_algebra(&self) -> Result<GradedQuotientAlgebra> {
        build_quotient(&self.quiver, &self.relators, (self.hi - self.lo) as u32)
    }
}

/// A basis of the morphisms `x → y` of the mesh category, as normal-form paths.
pub fn mesh_hom(frag: &MeshFragment, x: RepVertex, y: RepVertex) -> Result<Vec<Path>> {
    for z in [x, y] {
        if frag.object(z).is_none() {
            return Err(out_of_fragment(z));
        }
    }
    if x.level > y.level {
        return Ok(Vec::new());
    }
    let slice = RepetitiveSlice::new(frag.quiver(), x.level, y.level)?;
    let alg = slice.mesh_algebra()?;
    let key = BlockKey::new(slice.index(x), slice.index(y), (y.level - x.level) as u32, 0);
    Ok(alg.block(&key).map(|b| b.basis_paths().cloned().collect()).unwrap_or_default())
}
