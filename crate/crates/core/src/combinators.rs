//! Declarative theory libraries: `.lib` files whose entries build theories
//! from earlier ones by extension, renaming and combination.
//!
//! ```text
//! theory Carrier = base { record Carrier (A : Set) : Set where }
//! theory Pointed = extend Carrier with { e : A }
//! theory AdditivePointed = rename Pointed renaming (e to zero)
//! theory PointedMagma = combine Pointed Magma over Carrier
//! ```

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::eqtheory::{embed, extract, rename, EqTheory, RenameError, RenameScheme, ShapeError};
use crate::syntax::{Constr, Name, ParseError, Parser, RecordDecl, Tok};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoryExpr {
    Base(RecordDecl),
    Extend {
        parent: Name,
        decls: Vec<Constr>,
    },
    Rename {
        parent: Name,
        mapping: Vec<(Name, Name)>,
    },
    Combine {
        left: Name,
        right: Name,
        over: Name,
    },
}

impl TheoryExpr {
    pub fn parents(&self) -> Vec<&Name> {
        match self {
            TheoryExpr::Base(_) => vec![],
            TheoryExpr::Extend { parent, .. } | TheoryExpr::Rename { parent, .. } => vec![parent],
            TheoryExpr::Combine { left, right, over } => vec![left, right, over],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryEntry {
    pub name: Name,
    pub expr: TheoryExpr,
}

/// Parses a `.lib` file.
pub fn parse_library(source: &str) -> Result<Vec<TheoryEntry>, ParseError> {
    let mut p = Parser::new(source)?;
    let mut out = Vec::new();
    while p.at_word("theory") {
        p.keyword("theory")?;
        let name = p.ident()?;
        p.expect(Tok::Equals)?;
        let expr = if p.at_word("base") {
            p.keyword("base")?;
            p.expect(Tok::LBrace)?;
            let rec = p.record()?;
            p.expect(Tok::RBrace)?;
            TheoryExpr::Base(rec)
        } else if p.at_word("extend") {
            p.keyword("extend")?;
            let parent = p.ident()?;
            p.keyword("with")?;
            p.expect(Tok::LBrace)?;
            let decls = p.entries()?;
            p.expect(Tok::RBrace)?;
            TheoryExpr::Extend { parent, decls }
        } else if p.at_word("rename") {
            p.keyword("rename")?;
            let parent = p.ident()?;
            p.keyword("renaming")?;
            p.expect(Tok::LParen)?;
            let mut mapping = Vec::new();
            if *p.peek() != Tok::RParen {
                loop {
                    let from = p.ident()?;
                    p.keyword("to")?;
                    mapping.push((from, p.ident()?));
                    if *p.peek() != Tok::Comma {
                        break;
                    }
                    p.expect(Tok::Comma)?;
                }
            }
            p.expect(Tok::RParen)?;
            TheoryExpr::Rename { parent, mapping }
        } else if p.at_word("combine") {
            p.keyword("combine")?;
            let left = p.ident()?;
            let right = p.ident()?;
            p.keyword("over")?;
            let over = p.ident()?;
            TheoryExpr::Combine { left, right, over }
        } else {
            return Err(p.error(&["`base`", "`extend`", "`rename`", "`combine`"]));
        };
        out.push(TheoryEntry { name, expr });
    }
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["`theory`", "end of input"]));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("theory is defined twice")]
    Duplicate,
    #[error("`{0}` is not defined earlier in the library")]
    UnknownParent(Name),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Rename(#[from] RenameError),
    #[error("`{name}` clashes: {detail}")]
    Clash { name: Name, detail: String },
}

/// The first entry that failed to expand, and why.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("theory `{entry}`: {cause}")]
pub struct LibError {
    pub entry: Name,
    pub cause: ExpandError,
}

/// Expanded theories, in library order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Library {
    pub theories: Vec<EqTheory>,
    index: BTreeMap<Name, usize>,
}

impl Library {
    pub fn get(&self, name: &Name) -> Option<&EqTheory> {
        self.index.get(name).map(|&i| &self.theories[i])
    }

    pub fn len(&self) -> usize {
        self.theories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theories.is_empty()
    }

    fn push(&mut self, t: EqTheory) {
        self.index.insert(t.name.clone(), self.theories.len());
        self.theories.push(t);
    }
}

fn named(t: EqTheory, name: &Name) -> EqTheory {
    EqTheory {
        name: name.clone(),
        constructor: name.suffixed("C"),
        ..t
    }
}

fn clash(name: &Name, detail: impl Into<String>) -> ExpandError {
    ExpandError::Clash {
        name: name.clone(),
        detail: detail.into(),
    }
}

/// Expands one entry against the theories already in `ctx`.
pub fn expand(entry: &TheoryEntry, ctx: &Library) -> Result<EqTheory, ExpandError> {
    let lookup = |n: &Name| {
        ctx.get(n)
            .ok_or_else(|| ExpandError::UnknownParent(n.clone()))
    };
    match &entry.expr {
        TheoryExpr::Base(rec) => {
            let mut t = extract(rec)?;
            t.name = entry.name.clone();
            if rec.constructor == rec.name.suffixed("C") {
                t.constructor = entry.name.suffixed("C");
            }
            Ok(t)
        }
        TheoryExpr::Extend { parent, decls } => {
            let p = lookup(parent)?;
            let existing: BTreeSet<Name> = p.declared_names().into_iter().collect();
            let mut seen = BTreeSet::new();
            for d in decls {
                if existing.contains(&d.name) || !seen.insert(d.name.clone()) {
                    return Err(clash(&d.name, format!("already declared in `{parent}`")));
                }
            }
            let mut rec = embed(p);
            rec.fields.extend(decls.iter().cloned());
            Ok(named(extract(&rec)?, &entry.name))
        }
        TheoryExpr::Rename { parent, mapping } => {
            let p = lookup(parent)?;
            let mut map = BTreeMap::new();
            for (from, to) in mapping {
                if map.insert(from.clone(), to.clone()).is_some() {
                    return Err(clash(from, "renamed twice"));
                }
            }
            let renamed = rename(p, &RenameScheme::mapping(map))?;
            Ok(named(renamed, &entry.name))
        }
        TheoryExpr::Combine { left, right, over } => {
            combine(lookup(left)?, lookup(right)?, lookup(over)?, &entry.name)
        }
    }
}

/// Union by name of `l` and `r`. Every declaration of `o` must occur in
/// both with the same type; any other shared name is a clash.
pub fn combine(
    l: &EqTheory,
    r: &EqTheory,
    o: &EqTheory,
    name: &Name,
) -> Result<EqTheory, ExpandError> {
    let l_tel: BTreeMap<Name, Constr> = l
        .telescope()
        .into_iter()
        .map(|c| (c.name.clone(), c))
        .collect();
    let r_tel: BTreeMap<Name, Constr> = r
        .telescope()
        .into_iter()
        .map(|c| (c.name.clone(), c))
        .collect();
    let shared: BTreeSet<Name> = o.declared_names().into_iter().collect();
    for n in &shared {
        match (l_tel.get(n), r_tel.get(n)) {
            (Some(a), Some(b)) if a.ty == b.ty => {}
            (Some(_), Some(_)) => {
                return Err(clash(
                    n,
                    format!("`{}` and `{}` give it different types", l.name, r.name),
                ))
            }
            (None, _) => {
                return Err(clash(
                    n,
                    format!("declared in `{}` but missing from `{}`", o.name, l.name),
                ))
            }
            (_, None) => {
                return Err(clash(
                    n,
                    format!("declared in `{}` but missing from `{}`", o.name, r.name),
                ))
            }
        }
    }
    if l.sort_name() != r.sort_name() {
        return Err(clash(
            r.sort_name(),
            format!("sort differs from `{}`", l.sort_name()),
        ));
    }
    for n in r_tel.keys() {
        if l_tel.contains_key(n) && !shared.contains(n) {
            return Err(clash(
                n,
                format!("declared by both sides but not by `{}`", o.name),
            ));
        }
    }
    if l.waist != r.waist {
        return Err(clash(name, "the two sides have different parameter counts"));
    }
    let mut t = l.clone();
    t.func_types.extend(
        r.func_types
            .iter()
            .filter(|f| !l_tel.contains_key(&f.name))
            .cloned(),
    );
    t.axioms.extend(
        r.axioms
            .iter()
            .filter(|a| !l_tel.contains_key(&a.name))
            .cloned(),
    );
    let t = named(t, name);
    // re-extraction validates the union
    extract(&embed(&t))?;
    Ok(t)
}

/// Expands entries in order; the first failure aborts.
pub fn expand_library(entries: &[TheoryEntry]) -> Result<Library, LibError> {
    let mut lib = Library::default();
    for e in entries {
        let fail = |cause| LibError {
            entry: e.name.clone(),
            cause,
        };
        if lib.get(&e.name).is_some() {
            return Err(fail(ExpandError::Duplicate));
        }
        let t = expand(e, &lib).map_err(fail)?;
        lib.push(t);
    }
    Ok(lib)
}

/// Σ over theories of the input declaration plus one per construction.
pub fn definition_count(theories: usize, kinds: usize) -> usize {
    theories * (1 + kinds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_file;

    const BASICS: &str = "
theory Carrier = base { record Carrier (A : Set) : Set where }
theory Pointed = extend Carrier with { e : A }
theory Magma = extend Carrier with { op : A → A → A }
theory PointedMagma = combine Pointed Magma over Carrier
theory LeftUnital = extend PointedMagma with { lunit : {x : A} → op e x == x }
theory RightUnital = extend PointedMagma with { runit : {x : A} → op x e == x }
theory Unital = combine LeftUnital RightUnital over PointedMagma
theory Semigroup = extend Magma with { assoc : {x y z : A} → op x (op y z) == op (op x y) z }
-- the monoid axioms in the usual order
theory Monoid = combine Unital Semigroup over Magma
";

    fn lib(src: &str) -> Library {
        expand_library(&parse_library(src).unwrap()).unwrap()
    }

    fn theory(src: &str) -> EqTheory {
        extract(parse_file(src).unwrap()[0].as_record().unwrap()).unwrap()
    }

    #[test]
    fn parses_all_forms() {
        let entries = parse_library(
            "theory C = base { record C (A : Set) : Set where }\n\
             theory R = rename C renaming (A to B)\n\
             theory E = extend C with { e : A  f : A → A }\n\
             theory K = combine E E over C",
        )
        .unwrap();
        assert_eq!(entries.len(), 4);
        assert!(matches!(&entries[2].expr, TheoryExpr::Extend { decls, .. } if decls.len() == 2));
        assert!(
            matches!(&entries[1].expr, TheoryExpr::Rename { mapping, .. } if mapping.len() == 1)
        );
        assert!(parse_library("theory X = glue A").is_err());
        assert!(parse_library("").unwrap().is_empty());
    }

    #[test]
    fn monoid_from_tiny_theories() {
        let l = lib(BASICS);
        let m = l.get(&Name::new("Monoid")).unwrap();
        let fig = theory(
            "record Monoid (A : Set) : Set where
               field
                 e : A
                 op : A → A → A
                 lunit : {x : A} → op e x == x
                 runit : {x : A} → op x e == x
                 assoc : {x y z : A} → op x (op y z) == op (op x y) z",
        );
        assert_eq!(m, &fig);
    }

    #[test]
    fn combine_unital_has_each_declaration_once() {
        let l = lib(BASICS);
        let u = l.get(&Name::new("Unital")).unwrap();
        let left = l.get(&Name::new("LeftUnital")).unwrap();
        let right = l.get(&Name::new("RightUnital")).unwrap();
        let oracle: BTreeSet<Name> = left
            .declared_names()
            .into_iter()
            .chain(right.declared_names())
            .collect();
        let got = u.declared_names();
        assert_eq!(got.len(), oracle.len());
        assert_eq!(got.into_iter().collect::<BTreeSet<_>>(), oracle);
        assert_eq!(u.func_types.len(), 2);
        assert_eq!(u.axioms.len(), 2);
    }

    #[test]
    fn combine_commutes_up_to_order() {
        let l = lib(&format!(
            "{BASICS}\ntheory Flip = combine RightUnital LeftUnital over PointedMagma"
        ));
        let key = |t: &EqTheory| {
            let mut v: Vec<_> = t
                .telescope()
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    (
                        if i == 0 {
                            0
                        } else if i <= t.func_types.len() {
                            1
                        } else {
                            2
                        },
                        c.name,
                        crate::syntax::print_type(&c.ty),
                    )
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(
            key(l.get(&Name::new("Unital")).unwrap()),
            key(l.get(&Name::new("Flip")).unwrap())
        );
    }

    #[test]
    fn identity_rename_is_structural_identity() {
        let l = lib(&format!(
            "{BASICS}\ntheory Monoid2 = rename Monoid renaming ()"
        ));
        let a = l.get(&Name::new("Monoid")).unwrap();
        let b = l.get(&Name::new("Monoid2")).unwrap();
        assert_eq!(named(b.clone(), &a.name), *a);
    }

    #[test]
    fn rename_maps_declared_names() {
        let l = lib(&format!(
            "{BASICS}\ntheory AddMagma = rename Magma renaming (op to plus)"
        ));
        let m = l.get(&Name::new("AddMagma")).unwrap();
        assert_eq!(m.func_types[0].name, "plus");
        let err = expand_library(
            &parse_library(&format!(
                "{BASICS}\ntheory Bad = rename Magma renaming (foo to bar)"
            ))
            .unwrap(),
        );
        assert!(matches!(
            err,
            Err(LibError {
                cause: ExpandError::Rename(_),
                ..
            })
        ));
    }

    #[test]
    fn extend_is_monotone() {
        let l = lib(BASICS);
        let p = l.get(&Name::new("PointedMagma")).unwrap();
        let lu = l.get(&Name::new("LeftUnital")).unwrap();
        for c in p.telescope() {
            assert!(lu.telescope().contains(&c));
        }
    }

    #[test]
    fn clashes_are_rejected() {
        let src = format!(
            "{BASICS}\ntheory Op2 = extend Carrier with {{ op : A → A }}\ntheory Bad = combine Magma Op2 over Carrier"
        );
        let err = expand_library(&parse_library(&src).unwrap()).unwrap_err();
        assert_eq!(err.entry, "Bad");
        assert!(matches!(err.cause, ExpandError::Clash { ref name, .. } if name == "op"));

        let src = format!("{BASICS}\ntheory Bad = combine Carrier Magma over Pointed");
        assert!(matches!(
            expand_library(&parse_library(&src).unwrap())
                .unwrap_err()
                .cause,
            ExpandError::Clash { .. }
        ));

        let src = format!("{BASICS}\ntheory Bad = extend Magma with {{ op : A → A → A }}");
        assert!(matches!(
            expand_library(&parse_library(&src).unwrap())
                .unwrap_err()
                .cause,
            ExpandError::Clash { .. }
        ));
    }

    #[test]
    fn sort_cannot_be_redeclared() {
        let src = format!("{BASICS}\ntheory Bad = extend Magma with {{ B : Set }}");
        let err = expand_library(&parse_library(&src).unwrap()).unwrap_err();
        assert!(matches!(err.cause, ExpandError::Shape(_)));
    }

    #[test]
    fn library_errors_name_the_entry() {
        let err =
            expand_library(&parse_library("theory X = extend Nope with { }").unwrap()).unwrap_err();
        assert_eq!(err.entry, "X");
        assert_eq!(err.cause, ExpandError::UnknownParent(Name::new("Nope")));
        let dup = "theory C = base { record C (A : Set) : Set where }\ntheory C = extend C with { e : A }";
        assert_eq!(
            expand_library(&parse_library(dup).unwrap())
                .unwrap_err()
                .cause,
            ExpandError::Duplicate
        );
    }

    #[test]
    fn empty_library() {
        assert!(expand_library(&[]).unwrap().is_empty());
        assert_eq!(definition_count(0, 4), 0);
        assert_eq!(definition_count(50, 4), 250);
        assert_eq!(definition_count(1, 4), 5);
    }
}
