//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use theoryforge::{cmd_gen, cmd_lib, RunConfig, EXIT_CHECK, EXIT_OK};
use theoryforge_core::checker::{check_module, ErrorKind};
use theoryforge_core::combinators::{expand_library, parse_library, Library};
use theoryforge_core::engine::{
    eval, normalize_traced, rules_for, sample_term, suggested_fuel, Model, OpenTerm,
};
use theoryforge_core::eqtheory::{arity_of, embed, EqTheory};
use theoryforge_core::generators::{
    gen_hom, gen_monomorphism, gen_product, gen_signature, gen_termlang, prod_prelude, GenKind,
    HomNaming, Suffixes,
};
use theoryforge_core::syntax::{parse_file, print_decl, print_module, Decl, Name, TypeExpr};

const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const LIBRARY_LIMIT: Duration = Duration::from_secs(10);
const RANDOM_TERMS: usize = 1000;
const MAX_DEPTH: usize = 6;
const SEED: u64 = 0x7e0_4f09;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn monoid_file() -> PathBuf {
    root().join("library/monoid.eqt")
}

fn library_file() -> PathBuf {
    root().join("library/algebra.lib")
}

fn library() -> Library {
    let src = fs::read_to_string(library_file()).unwrap();
    expand_library(&parse_library(&src).unwrap()).unwrap()
}

fn quiet() -> (Vec<u8>, Vec<u8>) {
    (Vec::new(), Vec::new())
}

type Outcome = Result<String, String>;

/// Equal, or both quantified equations that differ only by swapping sides.
fn same_up_to_symmetry(a: &TypeExpr, b: &TypeExpr) -> bool {
    if a == b {
        return true;
    }
    let split = |t: &TypeExpr| match t {
        TypeExpr::Pi(bs, body) => match &**body {
            TypeExpr::Eq(l, r) => Some((bs.clone(), l.clone(), r.clone())),
            _ => None,
        },
        TypeExpr::Eq(l, r) => Some((vec![], l.clone(), r.clone())),
        _ => None,
    };
    match (split(a), split(b)) {
        (Some((bs, l, r)), Some((bs2, l2, r2))) => bs == bs2 && l == r2 && r == l2,
        _ => false,
    }
}

fn compare_decl(got: &Decl, want: &Decl, notes: &mut Vec<String>) -> Result<(), String> {
    let name = want.name();
    if got.name() != want.name() || got.as_record().is_some() != want.as_record().is_some() {
        return Err(format!("{} vs {}", got.name(), name));
    }
    if got.params() != want.params() {
        return Err(format!("{name}: parameters differ"));
    }
    let (ge, we) = (got.entries(), want.entries());
    if ge.len() != we.len() {
        return Err(format!(
            "{name}: {} entries, expected {}",
            ge.len(),
            we.len()
        ));
    }
    for (g, w) in ge.iter().zip(we) {
        if g.name != w.name {
            return Err(format!("{name}: entry `{}`, expected `{}`", g.name, w.name));
        }
        if g.ty != w.ty {
            if same_up_to_symmetry(&g.ty, &w.ty) {
                notes.push(format!("{name}.{} sides swapped", g.name));
            } else {
                return Err(format!("{name}.{}: type differs", g.name));
            }
        }
    }
    if let (Some(g), Some(w)) = (got.as_record(), want.as_record()) {
        if g.constructor != w.constructor {
            notes.push(format!(
                "{name} constructor {} vs {}",
                g.constructor, w.constructor
            ));
        }
    }
    Ok(())
}

fn golden_monoid() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let cfg = RunConfig {
        out_dir: tmp.path().to_path_buf(),
        ..RunConfig::default()
    };
    let (mut o, mut e) = quiet();
    let code = cmd_gen(&monoid_file(), &cfg, &mut o, &mut e);
    if code != EXIT_OK {
        return Err(format!("exit {code}: {}", String::from_utf8_lossy(&e)));
    }
    let want = parse_file(&fs::read_to_string(fixture("golden_monoid.eqt")).unwrap())
        .map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for w in &want {
        let path = tmp
            .path()
            .join("Monoid")
            .join(format!("{}.gen.eqt", w.name()));
        let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let got = parse_file(&text).map_err(|e| e.to_string())?;
        compare_decl(&got[0], w, &mut notes)?;
    }
    let elapsed = start.elapsed();
    if elapsed >= GOLDEN_LIMIT {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "{} blocks match in {:.3} s; tolerated: {}",
        want.len(),
        elapsed.as_secs_f64(),
        notes.join(", ")
    ))
}

fn library_scale() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let cfg = RunConfig {
        out_dir: tmp.path().to_path_buf(),
        ..RunConfig::default()
    };
    let (mut o, mut e) = quiet();
    let code = cmd_lib(&library_file(), &cfg, &mut o, &mut e);
    let elapsed = start.elapsed();
    let out = String::from_utf8_lossy(&o).into_owned();
    if code != EXIT_OK {
        return Err(format!("exit {code}: {out}{}", String::from_utf8_lossy(&e)));
    }
    let summary = out.lines().last().unwrap_or_default();
    let field = |k: &str| -> usize {
        summary
            .split_whitespace()
            .find_map(|kv| kv.strip_prefix(&format!("{k}=")))
            .and_then(|v| v.parse().ok())
            .unwrap_or(usize::MAX)
    };
    let (theories, definitions) = (field("theories"), field("definitions"));
    let expected = theories * (1 + cfg.kinds.len());
    // cross-check by counting the declarations actually written
    let mut counted = 0;
    for dir in fs::read_dir(tmp.path()).unwrap() {
        let module = dir.unwrap().path().join("module.gen.eqt");
        let decls = parse_file(&fs::read_to_string(&module).unwrap()).map_err(|e| e.to_string())?;
        if !check_module(&decls).is_empty() {
            return Err(format!("{} does not check", module.display()));
        }
        counted += decls.iter().filter(|d| **d != prod_prelude()).count();
    }
    if theories < 50 || definitions != expected || counted != definitions {
        return Err(format!("{summary}; expected {expected}, counted {counted}"));
    }
    if elapsed >= LIBRARY_LIMIT {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "{summary} ({:.2} per theory, {:.2} s)",
        definitions as f64 / theories as f64,
        elapsed.as_secs_f64()
    ))
}

fn bare_sort_outside_prod(ty: &TypeExpr, sort: &Name) -> bool {
    match ty {
        TypeExpr::Sort(n) => n == sort,
        TypeExpr::App(h, _) if h == "Prod" => false,
        TypeExpr::App(_, args) => args.iter().any(|a| bare_sort_outside_prod(a, sort)),
        TypeExpr::Arrow(d, c) => bare_sort_outside_prod(d, sort) || bare_sort_outside_prod(c, sort),
        TypeExpr::Pi(bs, body) => {
            bs.iter().any(|b| bare_sort_outside_prod(&b.ty, sort))
                || bare_sort_outside_prod(body, sort)
        }
        TypeExpr::Set(_) | TypeExpr::Eq(..) => false,
    }
}

fn soundness_of(t: &EqTheory) -> Result<(), String> {
    let s = Suffixes::default();
    let sig = gen_signature(t, &s).map_err(|e| e.to_string())?;
    if !sig.axioms.is_empty() || sig.func_types.len() != t.func_types.len() {
        return Err("signature".into());
    }
    let prod = embed(&gen_product(t, &s).map_err(|e| e.to_string())?);
    let sort = t.sort_name().suffixed(&s.prod);
    if prod
        .fields
        .iter()
        .any(|f| bare_sort_outside_prod(&f.ty, &sort))
    {
        return Err("product has a bare sort".into());
    }
    let lang = gen_termlang(t, &s);
    let arities: Vec<_> = lang.constructors.iter().map(|c| arity_of(&c.ty)).collect();
    let want: Vec<_> = t.func_types.iter().map(|f| arity_of(&f.ty)).collect();
    if arities != want {
        return Err("term language".into());
    }
    let naming = HomNaming::derive(t);
    let hom = gen_hom(t, &naming);
    if hom.fields.len() != 1 + t.func_types.len() {
        return Err("hom field count".into());
    }
    for (f, pres) in t.func_types.iter().zip(&hom.fields[1..]) {
        let bound = match &pres.ty {
            TypeExpr::Pi(bs, body) if matches!(**body, TypeExpr::Eq(..)) => {
                bs.iter().map(|b| b.names.len()).sum()
            }
            TypeExpr::Eq(..) => 0,
            _ => usize::MAX,
        };
        if bound != arity_of(&f.ty) {
            return Err(format!("preservation of `{}`", f.name));
        }
    }
    if gen_monomorphism(t, &naming).fields.len() != hom.fields.len() + 1 {
        return Err("monomorphism".into());
    }
    Ok(())
}

fn generation_soundness() -> Outcome {
    let lib = library();
    let mut failures = Vec::new();
    for t in &lib.theories {
        if let Err(e) = soundness_of(t) {
            failures.push(format!("{}: {e}", t.name));
        }
    }
    if failures.is_empty() {
        Ok(format!("{}/{} theories", lib.len(), lib.len()))
    } else {
        Err(failures.join("; "))
    }
}

fn right_nested(t: &OpenTerm) -> bool {
    match t {
        OpenTerm::Var(_) => true,
        OpenTerm::Op(f, args) => {
            let left_ok = !(f == "op" && matches!(&args[0], OpenTerm::Op(g, _) if g == "op"));
            left_ok && args.iter().all(right_nested)
        }
    }
}

fn meaning_preservation() -> Outcome {
    let lib = library();
    let monoid = lib.get(&Name::new("Monoid")).unwrap();
    let model = Model::new()
        .with_op("e", 0, |_: &[i64]| 0)
        .with_op("op", 2, |a: &[i64]| a[0].wrapping_add(a[1]));
    let default_rules = rules_for(monoid, false);
    let forced_rules = rules_for(monoid, true);
    let sources: Vec<_> = default_rules.iter().map(|r| r.source.to_string()).collect();
    if sources != ["lunit", "runit"] {
        return Err(format!("default rules from {sources:?}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut rewritten = 0;
    for i in 0..RANDOM_TERMS {
        let t = sample_term(monoid, 3, MAX_DEPTH, &mut |n| rng.gen_range(0..n));
        let env: Vec<i64> = (0..3)
            .map(|_| rng.gen_range(-1_000_000..1_000_000))
            .collect();
        let want = eval(&t, &model, &env).map_err(|e| e.to_string())?;
        for (rules, forced) in [(&default_rules, false), (&forced_rules, true)] {
            let n = normalize_traced(&t, rules, suggested_fuel(&t, rules));
            rewritten += usize::from(n.steps > 0);
            if n.out_of_fuel {
                return Err(format!("term {i} ran out of fuel"));
            }
            if eval(&n.term, &model, &env).map_err(|e| e.to_string())? != want {
                return Err(format!("term {i}: {t} normalized to {}", n.term));
            }
            if forced && !right_nested(&n.term) {
                return Err(format!("term {i}: {} is not right-nested", n.term));
            }
        }
    }
    Ok(format!(
        "{RANDOM_TERMS} terms of depth <= {MAX_DEPTH}, both rule sets; {rewritten} runs rewrote"
    ))
}

fn tree_hash(dir: &Path) -> String {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    let mut h = Sha256::new();
    for (name, bytes) in &files {
        h.update(name.as_bytes());
        h.update([0]);
        h.update(bytes);
        h.update([0]);
    }
    format!("{:x}", h.finalize())
}

fn round_trip_and_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let every: Vec<GenKind> = GenKind::ALL
        .into_iter()
        .filter(|k| *k != GenKind::Evaluator)
        .collect();
    let mut hashes: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut checked = 0;
    for (label, is_lib) in [("gen", false), ("lib", true)] {
        for (run, jobs) in [1usize, 1, 8].into_iter().enumerate() {
            let dir = tmp.path().join(format!("{label}-{run}"));
            let cfg = RunConfig {
                out_dir: dir.clone(),
                kinds: every.clone(),
                jobs,
                ..RunConfig::default()
            };
            let (mut o, mut e) = quiet();
            let code = if is_lib {
                cmd_lib(&library_file(), &cfg, &mut o, &mut e)
            } else {
                cmd_gen(&monoid_file(), &cfg, &mut o, &mut e)
            };
            if code != EXIT_OK {
                return Err(format!("{label} exit {code}"));
            }
            hashes.entry(label).or_default().push(tree_hash(&dir));
            if run == 0 {
                // every generated file is a fixed point of print ∘ parse
                let mut stack = vec![dir];
                while let Some(d) = stack.pop() {
                    for entry in fs::read_dir(&d).unwrap() {
                        let p = entry.unwrap().path();
                        if p.is_dir() {
                            stack.push(p);
                            continue;
                        }
                        let text = fs::read_to_string(&p).unwrap();
                        let decls =
                            parse_file(&text).map_err(|e| format!("{}: {e}", p.display()))?;
                        if print_module(&decls) != text {
                            return Err(format!("{} does not round-trip", p.display()));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    // bundled inputs: printing then parsing gives back the same declarations
    let mut inputs = parse_file(&fs::read_to_string(monoid_file()).unwrap()).unwrap();
    inputs.extend(library().theories.iter().map(|t| Decl::from(embed(t))));
    for d in &inputs {
        let again = parse_file(&print_decl(d)).map_err(|e| e.to_string())?;
        if again.as_slice() != std::slice::from_ref(d) {
            return Err(format!("{} does not round-trip", d.name()));
        }
    }
    for (label, hs) in &hashes {
        if hs.iter().any(|h| h != &hs[0]) {
            return Err(format!("{label} trees differ: {hs:?}"));
        }
    }
    Ok(format!(
        "{} inputs and {checked} generated files round-trip; gen {} and lib {} stable across jobs 1/1/8",
        inputs.len(),
        &hashes["gen"][0][..12],
        &hashes["lib"][0][..12]
    ))
}

fn checker_calibration() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_theoryforge");
    let mut seen = Vec::new();
    for (file, kind) in [
        ("duplicate_field.eqt", ErrorKind::DuplicateField),
        ("unbound_name.eqt", ErrorKind::UnboundName),
        ("arity_mismatch.eqt", ErrorKind::ArityMismatch),
    ] {
        let out = Command::new(bin)
            .arg("check")
            .arg(fixture(file))
            .output()
            .map_err(|e| e.to_string())?;
        let stdout = String::from_utf8_lossy(&out.stdout);
        let lines: Vec<_> = stdout.lines().collect();
        let tag = format!(": {kind}: ");
        if out.status.code() != Some(EXIT_CHECK) || lines.len() != 1 || !lines[0].contains(&tag) {
            return Err(format!(
                "{file}: exit {:?}, report {lines:?}",
                out.status.code()
            ));
        }
        seen.push(kind.to_string());
    }
    // the golden blocks, with the input and the pair type they rely on
    let mut module = vec![prod_prelude()];
    module.extend(parse_file(&fs::read_to_string(monoid_file()).unwrap()).unwrap());
    module.extend(parse_file(&fs::read_to_string(fixture("golden_monoid.eqt")).unwrap()).unwrap());
    let errs = check_module(&module);
    if !errs.is_empty() {
        return Err(format!("golden blocks: {errs:?}"));
    }
    Ok(format!(
        "{} each exit 2; {} golden blocks clean",
        seen.join(", "),
        module.len() - 2
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("1 golden constructions for the monoid input", golden_monoid),
        ("2 bundled library scale and counts", library_scale),
        ("3 generation soundness properties", generation_soundness),
        (
            "4 meaning preservation of simplification",
            meaning_preservation,
        ),
        ("5 round-trip and determinism", round_trip_and_determinism),
        ("6 checker calibration", checker_calibration),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
