//! JSON shapes for every report, and the text rendering derived from them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ginzburg_core::algebra::HilbertSeries;
use ginzburg_core::ginzburg::BlockComplex;
use ginzburg_core::linalg::{format_rational, SparseVec};
use ginzburg_core::mesh::MeshFragment;
use ginzburg_core::quiver::{BlockKey, Quiver};
use ginzburg_core::transfer::{AInfinityTable, HomologyBasis, RelationReport};
use ginzburg_core::translation::ComparisonReport;
use ginzburg_core::Rational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertEntry {
    pub w: u32,
    pub d: i32,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertJson {
    pub blocks: Vec<HilbertEntry>,
}

impl From<&HilbertSeries> for HilbertJson {
    fn from(h: &HilbertSeries) -> Self {
        let blocks = h.dims.iter().map(|(&(w, d), &dim)| HilbertEntry { w, d, dim }).collect();
        HilbertJson { blocks }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockJson {
    pub source: String,
    pub target: String,
    pub w: u32,
    pub d: i32,
}

impl BlockJson {
    pub fn new(q: &Quiver, key: &BlockKey) -> Self {
        BlockJson {
            source: q.vertex_label(key.source).into(),
            target: q.vertex_label(key.target).into(),
            w: key.weight,
            d: key.degree,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub coeff: String,
}

fn terms(v: &SparseVec, label: impl Fn(usize) -> String) -> Vec<Term> {
    v.iter().map(|(i, c)| Term { label: label(i), coeff: format_rational(c) }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub label: String,
    #[serde(flatten)]
    pub block: BlockJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub n: usize,
    pub inputs: Vec<String>,
    pub output: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub max_weight: u32,
    pub n_max: usize,
    pub basis: Vec<BasisEntry>,
    /// Entry counts by arity, including empty arities.
    pub counts: BTreeMap<usize, usize>,
    pub entries: Vec<TableEntry>,
}

impl TableJson {
    pub fn new(q: &Quiver, t: &AInfinityTable) -> Self {
        let b = &t.basis;
        let basis = (0..b.len()).map(|x| BasisEntry { label: b.label(x).into(), block: BlockJson::new(q, &b.key(x)) }).collect();
        let mut entries: Vec<TableEntry> = t
            .entries()
            .map(|(inputs, out)| TableEntry {
                n: inputs.len(),
                inputs: inputs.iter().map(|&x| b.label(x).to_string()).collect(),
                output: terms(out, |y| b.label(y).to_string()),
            })
            .collect();
        entries.sort_by(|x, y| x.n.cmp(&y.n).then_with(|| x.inputs.cmp(&y.inputs)));
        let counts = (2..=t.n_max).map(|n| (n, t.count(n))).collect();
        TableJson { max_weight: t.max_weight, n_max: t.n_max, basis, counts, entries }
    }

    /// Rebuilds a table over `basis`, resolving labels. Used to re-check stored fixtures.
    pub fn to_table(&self, basis: &HomologyBasis) -> Result<AInfinityTable, String> {
        let id = |l: &str| basis.id_of_label(l).ok_or_else(|| format!("unknown basis label `{l}`"));
        let mut t = AInfinityTable::new(basis.clone(), self.max_weight, self.n_max);
        for e in &self.entries {
            if e.inputs.len() != e.n {
                return Err(format!("entry has n = {} but {} inputs", e.n, e.inputs.len()));
            }
            let inputs = e.inputs.iter().map(|l| id(l)).collect::<Result<Vec<_>, _>>()?;
            let mut coords = Vec::new();
            for term in &e.output {
                let c: Rational = term.coeff.parse().map_err(|_| format!("bad coefficient `{}`", term.coeff))?;
                coords.push((id(&term.label)?, c));
            }
            t.set(inputs, SparseVec::from_entries(coords));
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationJson {
    pub inputs: Vec<String>,
    pub residual: Vec<Term>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationsJson {
    pub checked: BTreeMap<usize, usize>,
    pub violations: usize,
    /// The first few violations, for diagnosis.
    pub examples: Vec<ViolationJson>,
}

impl RelationsJson {
    pub fn new(labels: &dyn Fn(usize) -> String, r: &RelationReport) -> Self {
        let mut examples: Vec<ViolationJson> = r
            .violations
            .iter()
            .map(|v| ViolationJson { inputs: v.inputs.iter().map(|&x| labels(x)).collect(), residual: terms(&v.residual, labels) })
            .collect();
        examples.sort_by(|a, b| a.inputs.len().cmp(&b.inputs.len()).then_with(|| a.inputs.cmp(&b.inputs)));
        examples.truncate(10);
        RelationsJson { checked: r.checked.clone(), violations: r.violations.len(), examples }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MismatchJson {
    #[serde(flatten)]
    pub block: BlockJson,
    pub dim_a: usize,
    pub dim_b: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareJson {
    pub mode: String,
    pub blocks_checked: usize,
    pub mismatches: Vec<MismatchJson>,
    pub relator_failures: Vec<String>,
    pub non_bijective: Vec<BlockJson>,
    pub lambdas: Vec<String>,
    pub hilbert_a: HilbertJson,
    pub hilbert_b: HilbertJson,
}

impl CompareJson {
    pub fn new(mode: &str, q: &Quiver, r: &ComparisonReport) -> Self {
        let hilbert = |m: &BTreeMap<BlockKey, usize>| HilbertJson::from(&HilbertSeries::from_blocks(m.iter().map(|(k, d)| (k, *d))));
        CompareJson {
            mode: mode.into(),
            blocks_checked: r.blocks_checked,
            mismatches: r
                .mismatches
                .iter()
                .map(|m| MismatchJson { block: BlockJson::new(q, &m.key), dim_a: m.dim_a, dim_b: m.dim_b })
                .collect(),
            relator_failures: r.relator_failures.clone(),
            non_bijective: r.non_bijective.iter().map(|k| BlockJson::new(q, k)).collect(),
            lambdas: r.lambdas.iter().map(format_rational).collect(),
            hilbert_a: hilbert(&r.hilbert_a),
            hilbert_b: hilbert(&r.hilbert_b),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KnitObjectJson {
    pub vertex: String,
    pub level: i32,
    pub dim: Vec<i64>,
    pub class: Vec<i64>,
    pub shift: u32,
    pub shifted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RepArrowJson {
    pub label: String,
    pub source: (String, i32),
    pub target: (String, i32),
}

#[derive(Clone, Debug, Serialize)]
pub struct FragmentJson {
    pub depth: usize,
    pub unshifted: usize,
    /// Modules plus the first shifted object on each orbit.
    pub transjective: Vec<(String, i32)>,
    pub objects: Vec<KnitObjectJson>,
    pub arrows: Vec<RepArrowJson>,
}

impl FragmentJson {
    pub fn new(f: &MeshFragment) -> Self {
        let q = f.quiver();
        let name = |v: usize| q.vertex_label(v).to_string();
        FragmentJson {
            depth: f.depth(),
            unshifted: f.unshifted().count(),
            transjective: f.fundamental_domain().iter().map(|o| (name(o.position.vertex), o.position.level)).collect(),
            objects: f
                .objects()
                .map(|o| KnitObjectJson {
                    vertex: name(o.position.vertex),
                    level: o.position.level,
                    dim: o.dimension_vector(),
                    class: o.class.clone(),
                    shift: o.shift,
                    shifted: o.shift > 0,
                })
                .collect(),
            arrows: f
                .arrows()
                .iter()
                .map(|a| {
                    let (s, t) = (a.source(q), a.target(q));
                    RepArrowJson { label: a.label(q), source: (name(s.vertex), s.level), target: (name(t.vertex), t.level) }
                })
                .collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        let node = |v: &str, l: i32| format!("\"{v}@{l}\"");
        let mut s = String::from("digraph ar {\n  rankdir=LR;\n");
        for o in &self.objects {
            let dims: Vec<String> = o.dim.iter().map(|d| d.to_string()).collect();
            let shift = if o.shifted { format!("[{}]", o.shift) } else { String::new() };
            let style = if o.shifted { ", style=dashed" } else { "" };
            let _ = writeln!(s, "  {} [label=\"{}{}\"{}];", node(&o.vertex, o.level), dims.join(""), shift, style);
        }
        for a in &self.arrows {
            let _ = writeln!(s, "  {} -> {} [label=\"{}\"];", node(&a.source.0, a.source.1), node(&a.target.0, a.target.1), a.label);
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexBlockJson {
    #[serde(flatten)]
    pub block: BlockJson,
    pub basis: Vec<String>,
    /// Images of the basis vectors under `d`, in the block one degree down.
    pub differential: Vec<Vec<Term>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArrowProductJson {
    pub arrow: String,
    pub element: String,
    pub product: Vec<Term>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DumpJson {
    pub max_weight: u32,
    pub arrows: Vec<(String, String, String, u32, i32)>,
    pub blocks: Vec<ComplexBlockJson>,
    /// `a · x` for every arrow `a` and basis element `x`; these determine all products.
    pub arrow_products: Vec<ArrowProductJson>,
}

impl DumpJson {
    pub fn new(c: &BlockComplex) -> Self {
        let q = c.quiver();
        let alg = c.algebra();
        let keys: Vec<BlockKey> = c.keys().copied().collect();
        let blocks = keys
            .iter()
            .map(|key| {
                let lower = key.with_degree(key.degree - 1);
                ComplexBlockJson {
                    block: BlockJson::new(q, key),
                    basis: (0..c.dim(key)).map(|i| alg.basis_label(key, i)).collect(),
                    differential: (0..c.dim(key)).map(|i| terms(c.d_basis(key, i), |j| alg.basis_label(&lower, j))).collect(),
                }
            })
            .collect();
        let mut arrow_products = Vec::new();
        for (a, arrow) in q.arrows().iter().enumerate() {
            let Ok(ea) = alg.element_of_path(&ginzburg_core::quiver::Path::arrow(q, a)) else { continue };
            for key in keys.iter().filter(|k| k.source == arrow.target) {
                for i in 0..c.dim(key) {
                    let x = ginzburg_core::algebra::Element { key: *key, coords: SparseVec::unit(i) };
                    if let Ok(Some(p)) = c.multiply(&ea, &x) {
                        arrow_products.push(ArrowProductJson {
                            arrow: arrow.label.clone(),
                            element: alg.basis_label(key, i),
                            product: terms(&p.coords, |j| alg.basis_label(&p.key, j)),
                        });
                    }
                }
            }
        }
        DumpJson {
            max_weight: c.max_weight(),
            arrows: q
                .arrows()
                .iter()
                .map(|a| {
                    (a.label.clone(), q.vertex_label(a.source).into(), q.vertex_label(a.target).into(), a.bidegree.weight, a.bidegree.degree)
                })
                .collect(),
            blocks,
            arrow_products,
        }
    }
}

/// Indented `key: value` rendering of a JSON document.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| scalar(x).is_some() && !x.is_array()) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        Value::Object(m) if m.values().all(|x| !x.is_object() && scalar(x).is_some()) => {
            Some(m.iter().map(|(k, x)| format!("{k}={}", scalar(x).unwrap_or_default())).collect::<Vec<_>>().join(" "))
        }
        _ => None,
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        render(x, indent + 1, out);
                    }
                }
            }
        }
        _ => {
            let _ = writeln!(out, "{pad}{}", scalar(v).unwrap_or_default());
        }
    }
}
