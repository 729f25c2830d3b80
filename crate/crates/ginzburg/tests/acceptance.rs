//! Acceptance suite. Prints one PASS/FAIL line per criterion; every check is
//! exact. Exits nonzero on any result that differs from the recorded
//! expectation (see `EXPECTED_FAIL`).

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ginzburg::cli::Pipeline;
use ginzburg::core::algebra::{preprojective, PathVector};
use ginzburg::core::mesh::{knit, nakayama_and_n};
use ginzburg::core::quiver::{BlockKey, Path, Quiver};
use ginzburg::core::transfer::{check_ainf_relations, enumerate_pbr, verify_contraction, AInfinityTable};
use ginzburg::core::translation::{
    arrow_classes, build_twisted, build_u, check_u_equivariance, compare_homology_with_u, compare_twisted_with_u,
    mu3_prediction, normalize_dynkin_model,
};
use ginzburg::core::Rational;
use ginzburg::parse_quiver;
use num_traits::One;

/// Criterion 6 fails on A₃ with a known invariant μ₄; anything else is a regression.
const EXPECTED_FAIL: &[u32] = &[6];

type Check = Result<String, String>;

fn fixture(name: &str) -> Quiver {
    let path = format!("{}/tests/fixtures/{name}.q", env!("CARGO_MANIFEST_DIR"));
    parse_quiver(&std::fs::read_to_string(&path).expect("fixture")).expect("valid fixture")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

const STRUCTURAL: [&str; 4] = ["a2", "a3", "d4", "kronecker"];
const DYNKIN: [&str; 3] = ["a2", "a3", "d4"];

fn structural() -> Check {
    let mut parts = Vec::new();
    let mut slow = Vec::new();
    for name in STRUCTURAL {
        let t = Instant::now();
        let p = Pipeline::new(&fixture(name), 4).map_err(|e| format!("{name}: {e}"))?;
        let c = &p.complex;
        c.verify_d_squared().map_err(|e| format!("{name} d²: {e}"))?;
        c.verify_leibniz().map_err(|e| format!("{name} Leibniz: {e}"))?;
        verify_contraction(c, &p.retraction).map_err(|e| format!("{name} retraction: {e}"))?;
        let el = t.elapsed();
        if el > Duration::from_secs(10) {
            slow.push(name);
        }
        parts.push(format!("{name} {}", secs(el)));
    }
    let note = if slow.is_empty() { String::new() } else { format!("; over 10s: {}", slow.join(" ")) };
    Ok(format!("{}{note}", parts.join(", ")))
}

fn stasheff() -> Check {
    let mut parts = Vec::new();
    for name in STRUCTURAL {
        let t = Instant::now();
        let p = Pipeline::new(&fixture(name), 4).map_err(|e| e.to_string())?;
        let table = p.transfer(6).map_err(|e| e.to_string())?;
        let rep = check_ainf_relations(&table, 6);
        ensure(rep.is_ok(), || format!("{name}: {} violations", rep.violations.len()))?;
        let checked: usize = rep.checked.values().sum();
        parts.push(format!("{name} {checked} tuples {}", secs(t.elapsed())));
    }
    Ok(parts.join(", "))
}

fn formality() -> Check {
    let w = 5;
    let mut parts = Vec::new();
    for name in ["kronecker", "kronecker3"] {
        let t = Instant::now();
        let q = fixture(name);
        let p = Pipeline::new(&q, w).map_err(|e| e.to_string())?;
        let h = p.retraction.homology_dims();
        let positive: Vec<&BlockKey> = h.keys().filter(|k| k.degree != 0).collect();
        ensure(positive.is_empty(), || format!("{name}: homology in degree {}", positive[0].degree))?;
        let pi = preprojective(&q, w).map_err(|e| e.to_string())?.block_dims();
        let pi: std::collections::BTreeMap<_, _> = pi.into_iter().filter(|(_, d)| *d > 0).collect();
        ensure(h == pi, || format!("{name}: homology and preprojective dims differ"))?;
        let table = p.transfer(6).map_err(|e| e.to_string())?;
        let higher: usize = (3..=6).map(|n| table.count(n)).sum();
        ensure(higher == 0, || format!("{name}: {higher} nonzero μ_n with n ≥ 3"))?;
        let total: usize = h.values().sum();
        parts.push(format!("{name} dim H = {total}, μ₂ entries {} {}", table.count(2), secs(t.elapsed())));
    }
    Ok(parts.join(", "))
}

fn homology_vs_u() -> Check {
    let w = 4;
    let mut parts = Vec::new();
    for name in DYNKIN {
        let q = fixture(name);
        let p = Pipeline::new(&q, w).map_err(|e| e.to_string())?;
        let table = p.transfer(2).map_err(|e| e.to_string())?;
        let classes = arrow_classes(&p.complex, &p.retraction, 2 * q.arrow_count());
        let t = build_twisted(&q, w).map_err(|e| e.to_string())?;
        let u = build_u(&q, w).map_err(|e| e.to_string())?;
        let rep = compare_homology_with_u(&table, &|a| classes[a].clone(), &t, &u, w).map_err(|e| e.to_string())?;
        ensure(rep.is_ok(), || {
            format!(
                "{name}: {} mismatches, {} relator failures, {} non-bijective",
                rep.mismatches.len(),
                rep.relator_failures.len(),
                rep.non_bijective.len()
            )
        })?;
        parts.push(format!("{name} {} blocks", rep.blocks_checked));
    }
    Ok(parts.join(", "))
}

fn twisted_vs_u() -> Check {
    let w = 4;
    let mut parts = Vec::new();
    for name in DYNKIN {
        let q = fixture(name);
        let t = build_twisted(&q, w).map_err(|e| e.to_string())?;
        let u = build_u(&q, w).map_err(|e| e.to_string())?;
        let rep = compare_twisted_with_u(&t, &u, w).map_err(|e| e.to_string())?;
        ensure(rep.is_ok(), || {
            format!(
                "{name}: {} mismatches, {} relator failures, {} non-bijective",
                rep.mismatches.len(),
                rep.relator_failures.len(),
                rep.non_bijective.len()
            )
        })?;
        parts.push(format!("{name} {} blocks", rep.blocks_checked));
    }
    Ok(parts.join(", "))
}

fn dynkin_tables(name: &str) -> Result<(AInfinityTable, AInfinityTable, Vec<usize>), String> {
    let q = fixture(name);
    let p = Pipeline::new(&q, 4).map_err(|e| e.to_string())?;
    let raw = p.transfer(6).map_err(|e| e.to_string())?;
    let d = nakayama_and_n(&q).map_err(|e| e.to_string())?;
    let m = normalize_dynkin_model(&raw, &d).map_err(|e| e.to_string())?;
    Ok((raw, m.table, m.obstructed))
}

fn higher_counts(t: &AInfinityTable) -> [usize; 3] {
    [t.count(4), t.count(5), t.count(6)]
}

/// Result of criterion 6 plus whether it matches the recorded A₃ obstruction.
fn vanishing() -> (Check, bool) {
    let mut parts = Vec::new();
    let mut all_zero = true;
    let mut known = true;
    for name in DYNKIN {
        let (raw, norm, obstructed) = match dynkin_tables(name) {
            Ok(x) => x,
            Err(e) => return (Err(e), false),
        };
        let (r, n) = (higher_counts(&raw), higher_counts(&norm));
        all_zero &= r == [0; 3] && n == [0; 3];
        let expect: [usize; 3] = if name == "a3" { [2, 0, 0] } else { [0; 3] };
        known &= r == expect && n == expect && obstructed == if name == "a3" { vec![4] } else { vec![] };
        parts.push(format!("{name} μ4..6 raw {r:?} normalized {n:?}"));
        if name == "a3" {
            // The μ₄ output block (1 → 1, weight 4, degree 2) contains μ₂(s₃, s₁) ≠ 0.
            let d = nakayama_and_n(&fixture(name)).expect("Dynkin");
            let s = |i: usize| {
                let key = BlockKey::new(d.nu[i], i, d.shift[i], 1);
                let ids: Vec<usize> = norm.basis.block_ids(&key).collect();
                (ids.len() == 1).then(|| ids[0])
            };
            let witness = match (s(2), s(0)) {
                (Some(s3), Some(s1)) => norm.get(&[s3, s1]).filter(|v| !v.is_zero()).is_some(),
                _ => false,
            };
            let x = norm.basis.id_of_label("a*.b*");
            let y = norm.basis.id_of_label("b.a");
            let entry = match (x, y) {
                (Some(x), Some(y)) => norm.get(&[x, y, x, y]).map(|v| v.len()),
                _ => None,
            };
            known &= witness && entry.is_some();
            parts.push(format!(
                "a3 μ4(a*.b*, b.a, a*.b*, b.a) {} in block 1→1 w4 d2, μ2(s3, s1) {}, obstructed arities {obstructed:?}",
                if entry.is_some() { "≠ 0" } else { "= 0" },
                if witness { "≠ 0" } else { "= 0" },
            ));
        }
    }
    let detail = parts.join("; ");
    (if all_zero { Ok(detail) } else { Err(detail) }, known)
}

fn mu3_triples() -> Check {
    let w = 4;
    let q = fixture("a3");
    let lam = preprojective(&q, w).map_err(|e| e.to_string())?;
    let frag = knit(&q, w as usize + 1).map_err(|e| e.to_string())?;
    let d = nakayama_and_n(&q).map_err(|e| e.to_string())?;
    let (raw, norm, _) = dynkin_tables("a3")?;
    let pv = |s: &str| PathVector::from_terms([(Path::parse(lam.quiver(), s).expect("path"), Rational::one())]);
    let mut parts = Vec::new();
    for paths in [["b.a", "a*", "a"], ["a", "a*.b*", "b"], ["a*", "a", "a*.b*"]] {
        let xs: Vec<PathVector> = paths.iter().map(|s| pv(s)).collect();
        let pred = mu3_prediction(&q, &lam, &frag, &d, [&xs[0], &xs[1], &xs[2]]).map_err(|e| format!("{paths:?}: {e}"))?;
        for (which, table) in [("raw", &raw), ("normalized", &norm)] {
            let ids: Vec<usize> = paths
                .iter()
                .map(|s| table.basis.id_of_label(s).ok_or_else(|| format!("no class {s}")))
                .collect::<Result<_, _>>()?;
            let block: Vec<usize> = table.basis.block_ids(&pred.block).collect();
            ensure(block.len() == 1, || format!("{paths:?}: predicted block has dim {}", block.len()))?;
            let out = table.get(&ids).ok_or_else(|| format!("{paths:?}: μ3 = 0 ({which})"))?;
            ensure(out.len() == 1 && out.entries()[0].0 == block[0], || format!("{paths:?}: μ3 leaves the predicted block ({which})"))?;
            if which == "raw" {
                let s = ginzburg::core::linalg::format_rational(&out.entries()[0].1);
                parts.push(format!("μ3({}) = {s}·{}", paths.join(", "), pred.generator_label));
            }
        }
    }
    Ok(parts.join(", "))
}

fn equivariance() -> Check {
    let mut parts = Vec::new();
    for name in DYNKIN {
        let (raw, norm, _) = dynkin_tables(name)?;
        let d = nakayama_and_n(&fixture(name)).map_err(|e| e.to_string())?;
        let before = check_u_equivariance(&raw, &d).map_err(|e| e.to_string())?;
        let rep = check_u_equivariance(&norm, &d).map_err(|e| e.to_string())?;
        ensure(rep.failures.is_empty(), || format!("{name}: {} failures", rep.failures.len()))?;
        ensure(check_ainf_relations(&norm, 6).is_ok(), || format!("{name}: normalized table breaks the relations"))?;
        parts.push(format!("{name} {} checks (raw failures {})", rep.checked, before.failures.len()));
    }
    Ok(parts.join(", "))
}

fn fixtures() -> Check {
    let pbr: Vec<usize> = (2..=6).map(|n| enumerate_pbr(n).len()).collect();
    ensure(pbr == [1, 2, 5, 14, 42], || format!("PBR counts {pbr:?}"))?;
    let a3 = fixture("a3");
    let f = knit(&a3, 4).map_err(|e| e.to_string())?;
    let unshifted = f.unshifted().count();
    ensure(unshifted == 6, || format!("A3 unshifted objects {unshifted}"))?;
    let d = nakayama_and_n(&a3).map_err(|e| e.to_string())?;
    ensure(d.nu == [2, 1, 0], || format!("ν(A3) = {:?}", d.nu))?;
    Ok(format!("PBR {pbr:?}, A3 unshifted {unshifted}, ν(A3) = {:?}", d.nu))
}

fn determinism() -> Check {
    let path = format!("{}/tests/fixtures/a3.q", env!("CARGO_MANIFEST_DIR"));
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_ginzburg"))
            .args(["minimal-model", "--quiver", &path, "--wmax", "4", "--nmax", "6"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), || format!("exit status {:?}", a.status.code()))?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "outputs differ".into())?;
    Ok(format!("{} bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Check); 9] = [
        (1, "d² = 0, Leibniz, retraction identities", structural),
        (2, "Stasheff relations n ≤ 6", stasheff),
        (3, "formality of Kronecker quivers at weight 5", formality),
        (4, "homology vs derived translation algebra", homology_vs_u),
        (5, "twisted polynomial algebra vs derived translation algebra", twisted_vs_u),
        (7, "μ3 on the A3 triangles", mu3_triples),
        (8, "u-equivariance of μ3", equivariance),
        (9, "combinatorial fixtures", fixtures),
        (10, "deterministic minimal-model JSON", determinism),
    ];
    let mut unexpected = 0;
    let mut report = |n: u32, title: &str, r: &Check, t: Duration, known: bool| {
        let (tag, detail) = match r {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {n:>2} {tag} [{title}] ({}) {detail}", secs(t));
        let expected_fail = EXPECTED_FAIL.contains(&n);
        if r.is_ok() == expected_fail || (expected_fail && !known) {
            unexpected += 1;
        }
    };
    for (n, title, f) in &criteria[..5] {
        let t = Instant::now();
        let r = f();
        report(*n, title, &r, t.elapsed(), true);
    }
    let t = Instant::now();
    let (r, known) = vanishing();
    report(6, "μ4..6 = 0 on Dynkin tables", &r, t.elapsed(), known);
    for (n, title, f) in &criteria[5..] {
        let t = Instant::now();
        let r = f();
        report(*n, title, &r, t.elapsed(), true);
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected result(s)");
        ExitCode::FAILURE
    } else {
        println!("all results as recorded (criterion 6 fails on A3 with the known μ4 obstruction)");
        ExitCode::SUCCESS
    }
}
