use std::path::PathBuf;

use theoryforge_core::checker::check_module;
use theoryforge_core::combinators::{expand_library, parse_library};
use theoryforge_core::eqtheory::embed;
use theoryforge_core::generators::{assemble_module, gen_all, GenKind, Suffixes};
use theoryforge_core::syntax::{parse_file, print_module, Name};

fn bundled() -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../library/algebra.lib");
    std::fs::read_to_string(path).unwrap()
}

fn every_kind() -> Vec<GenKind> {
    GenKind::ALL
        .into_iter()
        .filter(|k| *k != GenKind::Evaluator)
        .collect()
}

#[test]
fn bundled_library_expands() {
    let lib = expand_library(&parse_library(&bundled()).unwrap()).unwrap();
    assert!(lib.len() >= 50, "only {} theories", lib.len());
    let monoid = lib.get(&Name::new("Monoid")).unwrap();
    let funcs: Vec<_> = monoid
        .func_types
        .iter()
        .map(|f| f.name.to_string())
        .collect();
    let axioms: Vec<_> = monoid.axioms.iter().map(|a| a.name.to_string()).collect();
    assert_eq!(funcs, ["e", "op"]);
    assert_eq!(axioms, ["lunit", "runit", "assoc"]);
    let ring = lib.get(&Name::new("Ring")).unwrap();
    assert_eq!(ring.func_types.len(), 5);
    assert!(lib.get(&Name::new("BoundedDistributiveLattice")).is_some());
}

#[test]
fn every_theory_generates_a_clean_module() {
    let lib = expand_library(&parse_library(&bundled()).unwrap()).unwrap();
    for t in &lib.theories {
        let generated = gen_all(t, &every_kind(), &Suffixes::default())
            .unwrap_or_else(|e| panic!("{}: {e}", t.name));
        assert_eq!(generated.len(), every_kind().len());
        let module = assemble_module(embed(t).into(), generated);
        let errs = check_module(&module);
        assert!(errs.is_empty(), "{}: {errs:?}", t.name);

        // the printed module reparses to the same declarations and still checks
        let text = print_module(&module);
        let reparsed = parse_file(&text).unwrap();
        assert_eq!(reparsed, module, "{}", t.name);
        assert!(check_module(&reparsed).is_empty(), "{}", t.name);
    }
}

#[test]
fn expansion_is_deterministic() {
    let entries = parse_library(&bundled()).unwrap();
    assert_eq!(
        expand_library(&entries).unwrap(),
        expand_library(&entries).unwrap()
    );
}
