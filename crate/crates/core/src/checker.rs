//! A simply-sorted checker for declarations: name resolution, application
//! arities, equation sorts, and module-wide distinctness of field names.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{Binder, DataDecl, Decl, Name, Pos, RecordDecl, Term, TypeExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorKind {
    UnboundName,
    ArityMismatch,
    SortMismatch,
    DuplicateField,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::UnboundName => "UnboundName",
            ErrorKind::ArityMismatch => "ArityMismatch",
            ErrorKind::SortMismatch => "SortMismatch",
            ErrorKind::DuplicateField => "DuplicateField",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckError {
    pub kind: ErrorKind,
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.pos, self.kind, self.message)
    }
}

/// One `FILE:LINE:COL: KIND: message` line per error.
pub fn format_report(file: &str, errors: &[CheckError]) -> String {
    errors.iter().map(|e| format!("{file}:{e}\n")).collect()
}

/// Declarations already checked, plus every name taken in the module.
#[derive(Clone, Debug, Default)]
pub struct CheckContext {
    records: BTreeMap<Name, RecordDecl>,
    datas: BTreeMap<Name, DataDecl>,
    /// field name → (record, index)
    fields: BTreeMap<Name, (Name, usize)>,
    /// data constructor → data type
    ctors: BTreeMap<Name, Name>,
    used: BTreeSet<Name>,
}

impl CheckContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn used_names(&self) -> &BTreeSet<Name> {
        &self.used
    }

    fn add(&mut self, d: &Decl) {
        match d {
            Decl::Record(r) => {
                for (i, f) in r.fields.iter().enumerate() {
                    self.fields
                        .entry(f.name.clone())
                        .or_insert((r.name.clone(), i));
                }
                self.records
                    .entry(r.name.clone())
                    .or_insert_with(|| r.clone());
            }
            Decl::Data(dd) => {
                for c in &dd.constructors {
                    self.ctors.entry(c.name.clone()).or_insert(dd.name.clone());
                }
                self.datas
                    .entry(dd.name.clone())
                    .or_insert_with(|| dd.clone());
            }
        }
    }

    fn type_params(&self, n: &Name) -> Option<&[Binder]> {
        self.records
            .get(n)
            .map(|r| r.params.as_slice())
            .or_else(|| self.datas.get(n).map(|d| d.params.as_slice()))
    }
}

#[derive(Clone, Debug)]
enum Local {
    Sort,
    Term(TypeExpr),
}

struct Checker<'a> {
    ctx: &'a CheckContext,
    scope: Vec<(Name, Local)>,
    errors: Vec<CheckError>,
}

fn flat_params(ps: &[Binder]) -> Vec<(Name, TypeExpr)> {
    ps.iter()
        .flat_map(|b| b.names.iter().map(move |n| (n.clone(), b.ty.clone())))
        .collect()
}

pub(crate) fn term_to_type(t: &Term) -> TypeExpr {
    let (_, args) = t.spine();
    TypeExpr::app(
        t.head_name().clone(),
        args.into_iter().map(term_to_type).collect(),
    )
}

fn type_to_term(ty: &TypeExpr) -> Option<Term> {
    match ty {
        TypeExpr::Sort(n) => Some(Term::Sym(n.clone())),
        TypeExpr::App(h, args) => Some(Term::apply(
            Term::Sym(h.clone()),
            args.iter().map(type_to_term).collect::<Option<Vec<_>>>()?,
        )),
        _ => None,
    }
}

/// Substitutes names: `tys` in type positions, `terms` at term leaves.
fn subst(ty: &TypeExpr, tys: &BTreeMap<Name, TypeExpr>, terms: &BTreeMap<Name, Term>) -> TypeExpr {
    let term = |t: &Term| {
        t.map_names(&mut |leaf| match leaf {
            Term::Sym(n) | Term::Var(n) => terms.get(n).cloned().unwrap_or_else(|| leaf.clone()),
            Term::App(..) => leaf.clone(),
        })
    };
    match ty {
        TypeExpr::Set(_) => ty.clone(),
        TypeExpr::Sort(n) => tys.get(n).cloned().unwrap_or_else(|| ty.clone()),
        TypeExpr::App(h, args) => {
            let args = args.iter().map(|a| subst(a, tys, terms)).collect();
            match tys.get(h) {
                Some(TypeExpr::Sort(h2)) => TypeExpr::app(h2.clone(), args),
                _ => TypeExpr::App(h.clone(), args),
            }
        }
        TypeExpr::Arrow(d, c) => TypeExpr::arrow(subst(d, tys, terms), subst(c, tys, terms)),
        TypeExpr::Pi(bs, body) => TypeExpr::Pi(
            bs.iter()
                .map(|b| Binder {
                    ty: subst(&b.ty, tys, terms),
                    ..b.clone()
                })
                .collect(),
            Box::new(subst(body, tys, terms)),
        ),
        TypeExpr::Eq(l, r) => TypeExpr::Eq(term(l), term(r)),
    }
}

fn is_function(ty: &TypeExpr) -> bool {
    matches!(ty, TypeExpr::Arrow(..) | TypeExpr::Pi(..))
}

/// One-way matching of `pat` against `actual`, binding the names in `holes`.
fn match_type(
    pat: &TypeExpr,
    actual: &TypeExpr,
    holes: &BTreeSet<Name>,
    sub: &mut BTreeMap<Name, TypeExpr>,
) -> bool {
    match (pat, actual) {
        (TypeExpr::Sort(n), _) if holes.contains(n) => match sub.get(n) {
            Some(bound) => bound == actual,
            None => {
                sub.insert(n.clone(), actual.clone());
                true
            }
        },
        (TypeExpr::App(h, ps), TypeExpr::App(g, xs)) => {
            h == g
                && ps.len() == xs.len()
                && ps.iter().zip(xs).all(|(p, x)| match_type(p, x, holes, sub))
        }
        (TypeExpr::Arrow(d, c), TypeExpr::Arrow(d2, c2)) => {
            match_type(d, d2, holes, sub) && match_type(c, c2, holes, sub)
        }
        _ => pat == actual,
    }
}

impl<'a> Checker<'a> {
    fn err(&mut self, kind: ErrorKind, pos: Pos, message: String) {
        self.errors.push(CheckError { kind, pos, message });
    }

    fn local(&self, n: &Name) -> Option<&Local> {
        self.scope
            .iter()
            .rev()
            .find(|(m, _)| m == n)
            .map(|(_, l)| l)
    }

    fn bind(&mut self, n: &Name, ty: &TypeExpr) {
        let l = if ty.is_set() {
            Local::Sort
        } else {
            Local::Term(ty.clone())
        };
        self.scope.push((n.clone(), l));
    }

    /// Checks that `ty` is a well-formed type.
    fn wf(&mut self, ty: &TypeExpr) {
        match ty {
            TypeExpr::Set(_) => {}
            TypeExpr::Sort(n) => self.wf_head(n, &[]),
            TypeExpr::App(h, args) => self.wf_head(h, args),
            TypeExpr::Arrow(d, c) => {
                self.wf(d);
                self.wf(c);
            }
            TypeExpr::Pi(bs, body) => {
                let mark = self.scope.len();
                for b in bs {
                    self.wf(&b.ty);
                    for n in &b.names {
                        self.bind(n, &b.ty);
                    }
                }
                self.wf(body);
                self.scope.truncate(mark);
            }
            TypeExpr::Eq(l, r) => self.equation(l, r),
        }
    }

    fn wf_head(&mut self, h: &Name, args: &[TypeExpr]) {
        match self.local(h) {
            Some(Local::Sort) => {
                if !args.is_empty() {
                    self.err(
                        ErrorKind::ArityMismatch,
                        h.pos,
                        format!("sort `{h}` takes no arguments, given {}", args.len()),
                    );
                }
                return;
            }
            Some(Local::Term(_)) => {
                self.err(
                    ErrorKind::SortMismatch,
                    h.pos,
                    format!("`{h}` is a term, not a type"),
                );
                return;
            }
            None => {}
        }
        if let Some(params) = self.ctx.type_params(h) {
            let params = flat_params(params);
            if params.len() != args.len() {
                self.err(
                    ErrorKind::ArityMismatch,
                    h.pos,
                    format!(
                        "`{h}` takes {} parameter(s), given {}",
                        params.len(),
                        args.len()
                    ),
                );
                return;
            }
            self.type_args(h, &params, args);
            return;
        }
        if let Some((rec, idx)) = self.ctx.fields.get(h) {
            let field_ty = &self.ctx.records[rec].fields[*idx].ty;
            if !field_ty.is_set() {
                self.err(
                    ErrorKind::SortMismatch,
                    h.pos,
                    format!("`{h}` is not a type"),
                );
                return;
            }
            if args.len() != 1 {
                self.err(
                    ErrorKind::ArityMismatch,
                    h.pos,
                    format!(
                        "type projection `{h}` takes one instance, given {}",
                        args.len()
                    ),
                );
                return;
            }
            let rec = rec.clone();
            self.instance_of(&rec, &args[0], h);
            return;
        }
        if self.ctx.ctors.contains_key(h) {
            self.err(
                ErrorKind::SortMismatch,
                h.pos,
                format!("constructor `{h}` is not a type"),
            );
        } else {
            self.err(
                ErrorKind::UnboundName,
                h.pos,
                format!("`{h}` is not in scope"),
            );
        }
    }

    /// Arguments to a parameterised type: types for `Set` parameters, terms
    /// of the substituted parameter type otherwise.
    fn type_args(&mut self, h: &Name, params: &[(Name, TypeExpr)], args: &[TypeExpr]) {
        let mut tys = BTreeMap::new();
        let mut terms = BTreeMap::new();
        for ((p, pty), a) in params.iter().zip(args) {
            if pty.is_set() {
                self.wf(a);
            } else {
                let expected = subst(pty, &tys, &terms);
                match type_to_term(a) {
                    Some(t) => self.against(&t, &expected),
                    None => self.err(
                        ErrorKind::SortMismatch,
                        a.pos(),
                        format!(
                            "argument of `{h}` must be a term of type {}",
                            crate::syntax::print_type(&expected)
                        ),
                    ),
                }
            }
            if let Some(t) = type_to_term(a) {
                terms.insert(p.clone(), t);
            }
            tys.insert(p.clone(), a.clone());
        }
    }

    /// Checks `inst` is an instance of record `rec`; returns its type.
    fn instance_of(&mut self, rec: &Name, inst: &TypeExpr, at: &Name) -> Option<Vec<TypeExpr>> {
        let Some(t) = type_to_term(inst) else {
            self.err(
                ErrorKind::SortMismatch,
                inst.pos(),
                format!("`{at}` expects an instance of `{rec}`"),
            );
            return None;
        };
        match self.infer(&t)? {
            TypeExpr::Sort(r) if &r == rec => Some(vec![]),
            TypeExpr::App(r, args) if &r == rec => Some(args),
            other => {
                self.err(
                    ErrorKind::SortMismatch,
                    t.pos(),
                    format!(
                        "`{at}` expects an instance of `{rec}`, found {}",
                        crate::syntax::print_type(&other)
                    ),
                );
                None
            }
        }
    }

    fn against(&mut self, t: &Term, expected: &TypeExpr) {
        let Some(found) = self.infer(t) else { return };
        if &found != expected {
            let kind = if is_function(&found) {
                ErrorKind::ArityMismatch
            } else {
                ErrorKind::SortMismatch
            };
            self.err(
                kind,
                t.pos(),
                format!(
                    "expected {}, found {}",
                    crate::syntax::print_type(expected),
                    crate::syntax::print_type(&found)
                ),
            );
        }
    }

    fn equation(&mut self, l: &Term, r: &Term) {
        let (lt, rt) = (self.infer(l), self.infer(r));
        for (side, ty) in [(l, &lt), (r, &rt)] {
            if let Some(ty) = ty.as_ref().filter(|ty| is_function(ty)) {
                self.err(
                    ErrorKind::ArityMismatch,
                    side.pos(),
                    format!(
                        "`{}` is under-applied (type {})",
                        side.head_name(),
                        crate::syntax::print_type(ty)
                    ),
                );
            }
        }
        if let (Some(lt), Some(rt)) = (lt, rt) {
            if !is_function(&lt) && !is_function(&rt) && lt != rt {
                self.err(
                    ErrorKind::SortMismatch,
                    r.pos(),
                    format!(
                        "sides have sorts {} and {}",
                        crate::syntax::print_type(&lt),
                        crate::syntax::print_type(&rt)
                    ),
                );
            }
        }
    }

    /// The type of the head of a spine, given its arguments (field
    /// projections consume their instance argument here).
    fn head_type<'t>(&mut self, h: &Name, args: &mut &'t [&'t Term]) -> Option<TypeExpr> {
        match self.local(h) {
            Some(Local::Term(ty)) => return Some(ty.clone()),
            Some(Local::Sort) => {
                self.err(
                    ErrorKind::SortMismatch,
                    h.pos,
                    format!("`{h}` is a type, not a term"),
                );
                return None;
            }
            None => {}
        }
        if let Some((rec, idx)) = self.ctx.fields.get(h).cloned() {
            let Some((inst, rest)) = args.split_first() else {
                self.err(
                    ErrorKind::ArityMismatch,
                    h.pos,
                    format!("field `{h}` needs an instance of `{rec}`"),
                );
                return None;
            };
            *args = rest;
            let targs = self.instance_of(&rec, &term_to_type(inst), h)?;
            let r = &self.ctx.records[&rec];
            let mut tys = BTreeMap::new();
            let mut terms = BTreeMap::new();
            for ((p, _), a) in flat_params(&r.params).into_iter().zip(targs) {
                if let Some(t) = type_to_term(&a) {
                    terms.insert(p.clone(), t);
                }
                tys.insert(p, a);
            }
            for g in &r.fields[..idx] {
                let inst_ty = term_to_type(inst);
                tys.insert(g.name.clone(), TypeExpr::App(g.name.clone(), vec![inst_ty]));
                terms.insert(
                    g.name.clone(),
                    Term::apply(Term::Sym(g.name.clone()), [(*inst).clone()]),
                );
            }
            return Some(subst(&r.fields[idx].ty, &tys, &terms));
        }
        if let Some(data) = self.ctx.ctors.get(h) {
            let d = &self.ctx.datas[data];
            let c = d.constructors.iter().find(|c| &c.name == h)?;
            if d.params.is_empty() {
                return Some(c.ty.clone());
            }
            // instantiate the data parameters from the argument types
            let holes: BTreeSet<Name> =
                flat_params(&d.params).into_iter().map(|(n, _)| n).collect();
            let (doms, _) = c.ty.uncurry();
            let doms: Vec<TypeExpr> = doms.into_iter().cloned().collect();
            let ty = c.ty.clone();
            let mut sub = BTreeMap::new();
            for (dom, a) in doms.iter().zip(args.iter()) {
                if let Some(at) = self.infer(a) {
                    match_type(dom, &at, &holes, &mut sub);
                }
            }
            return Some(subst(&ty, &sub, &BTreeMap::new()));
        }
        if self.ctx.type_params(h).is_some() {
            self.err(
                ErrorKind::SortMismatch,
                h.pos,
                format!("`{h}` is a type, not a term"),
            );
        } else {
            self.err(
                ErrorKind::UnboundName,
                h.pos,
                format!("`{h}` is not in scope"),
            );
        }
        None
    }

    fn infer(&mut self, t: &Term) -> Option<TypeExpr> {
        let (_, args) = t.spine();
        let h = t.head_name();
        let args_vec = args;
        let mut args: &[&Term] = &args_vec;
        let mut ty = self.head_type(h, &mut args)?;
        let mut ok = true;
        for a in args {
            match ty {
                TypeExpr::Arrow(d, c) => {
                    self.against(a, &d);
                    ty = *c;
                }
                TypeExpr::Pi(mut bs, body) => {
                    let b = bs.remove(0);
                    let mut names = b.names.clone();
                    let first = names.remove(0);
                    self.against(a, &b.ty);
                    let mut rest = Vec::new();
                    if !names.is_empty() {
                        rest.push(Binder { names, ..b.clone() });
                    }
                    rest.extend(bs);
                    let terms = BTreeMap::from([(first.clone(), (*a).clone())]);
                    let tys = BTreeMap::from([(first, term_to_type(a))]);
                    ty = subst(&TypeExpr::pi(rest, *body), &tys, &terms);
                }
                _ => {
                    if ok {
                        self.err(
                            ErrorKind::ArityMismatch,
                            h.pos,
                            format!("`{h}` is applied to too many arguments"),
                        );
                    }
                    ok = false;
                }
            }
        }
        ok.then_some(ty)
    }

    fn duplicate(&mut self, n: &Name, seen: &mut BTreeSet<Name>, what: &str) {
        if !seen.insert(n.clone()) {
            self.err(
                ErrorKind::DuplicateField,
                n.pos,
                format!("{what} `{n}` is already defined in this module"),
            );
        }
    }
}

/// Checks one declaration against the names and declarations in `ctx`.
pub fn check_decl(d: &Decl, ctx: &CheckContext) -> Vec<CheckError> {
    let mut used = ctx.used.clone();
    check_decl_in(d, ctx, &mut used)
}

fn check_decl_in(d: &Decl, ctx: &CheckContext, used: &mut BTreeSet<Name>) -> Vec<CheckError> {
    let mut c = Checker {
        ctx,
        scope: Vec::new(),
        errors: Vec::new(),
    };
    c.duplicate(d.name(), used, "declaration");
    for b in d.params() {
        c.wf(&b.ty);
        for n in &b.names {
            c.bind(n, &b.ty);
        }
    }
    match d {
        Decl::Record(r) => {
            c.duplicate(&r.constructor, used, "constructor");
            for f in &r.fields {
                c.duplicate(&f.name, used, "field");
                c.wf(&f.ty);
                c.bind(&f.name, &f.ty);
            }
        }
        Decl::Data(dd) => {
            // the data type is in scope in its own constructors
            let mut with_self = ctx.clone();
            with_self.datas.insert(
                dd.name.clone(),
                DataDecl {
                    constructors: vec![],
                    ..dd.clone()
                },
            );
            let mut inner = Checker {
                ctx: &with_self,
                scope: std::mem::take(&mut c.scope),
                errors: std::mem::take(&mut c.errors),
            };
            let result = TypeExpr::app(
                dd.name.clone(),
                flat_params(&dd.params)
                    .into_iter()
                    .map(|(n, _)| TypeExpr::Sort(n))
                    .collect(),
            );
            for con in &dd.constructors {
                inner.duplicate(&con.name, used, "constructor");
                let before = inner.errors.len();
                inner.wf(&con.ty);
                if inner.errors.len() == before && con.ty.uncurry().1 != &result {
                    inner.err(
                        ErrorKind::SortMismatch,
                        con.ty.uncurry().1.pos(),
                        format!(
                            "constructor `{}` must build {}",
                            con.name,
                            crate::syntax::print_type(&result)
                        ),
                    );
                }
            }
            c.errors = inner.errors;
        }
    }
    c.errors
}

/// Checks declarations in order, threading the module namespace.
pub fn check_module(ds: &[Decl]) -> Vec<CheckError> {
    let mut ctx = CheckContext::new();
    let mut errors = Vec::new();
    for d in ds {
        let mut used = std::mem::take(&mut ctx.used);
        errors.extend(check_decl_in(d, &ctx, &mut used));
        ctx.used = used;
        ctx.add(d);
    }
    errors.sort_by_key(|e| (e.pos.line, e.pos.col));
    errors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqtheory::{embed, extract};
    use crate::generators::{assemble_module, gen_all, GenKind, Suffixes};
    use crate::syntax::parse_file;

    const MONOID: &str = "record Monoid (A : Set) : Set where
  constructor monoid
  field
    e : A
    op : A → A → A
    lunit : {x : A} → op e x == x
    runit : {x : A} → op x e == x
    assoc : {x y z : A} → op x (op y z) == op (op x y) z
";

    fn kinds(src: &str) -> Vec<ErrorKind> {
        check_module(&parse_file(src).unwrap())
            .iter()
            .map(|e| e.kind)
            .collect()
    }

    #[test]
    fn monoid_is_clean() {
        assert_eq!(kinds(MONOID), []);
        assert_eq!(kinds(""), []);
    }

    #[test]
    fn generated_module_is_clean() {
        let decls = parse_file(MONOID).unwrap();
        let t = extract(decls[0].as_record().unwrap()).unwrap();
        let all: Vec<_> = GenKind::ALL
            .into_iter()
            .filter(|k| *k != GenKind::Evaluator)
            .collect();
        let module = assemble_module(
            embed(&t).into(),
            gen_all(&t, &all, &Suffixes::default()).unwrap(),
        );
        let errs = check_module(&module);
        assert!(errs.is_empty(), "{errs:?}");
    }

    #[test]
    fn duplicate_field_in_one_record() {
        let errs = check_module(
            &parse_file("record P (A : Set) : Set where field\n  e : A\n  e : A").unwrap(),
        );
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ErrorKind::DuplicateField);
        assert_eq!((errs[0].pos.line, errs[0].pos.col), (3, 3));
    }

    #[test]
    fn duplicate_across_declarations() {
        let src = format!(
            "{MONOID}\n{}",
            MONOID
                .replace("Monoid", "Monoid2")
                .replace("monoid", "monoid2")
        );
        assert_eq!(kinds(&src), vec![ErrorKind::DuplicateField; 5]);
        let twice = format!("{MONOID}\n{MONOID}");
        assert!(kinds(&twice)
            .iter()
            .all(|k| *k == ErrorKind::DuplicateField));
    }

    #[test]
    fn under_applied_operation() {
        let src =
            "record M (A : Set) : Set where field\n op : A → A → A\n bad : {x : A} → op x == x";
        assert_eq!(kinds(src), [ErrorKind::ArityMismatch]);
    }

    #[test]
    fn over_applied_operation() {
        let src = "record M (A : Set) : Set where field\n e : A\n bad : {x : A} → e x == x";
        assert_eq!(kinds(src), [ErrorKind::ArityMismatch]);
    }

    #[test]
    fn unbound_names() {
        assert_eq!(
            kinds("record M (A : Set) : Set where field\n op : B → A"),
            [ErrorKind::UnboundName]
        );
        assert_eq!(
            kinds("record M (A : Set) : Set where field\n e : A\n u : {x : A} → f e == x"),
            [ErrorKind::UnboundName]
        );
    }

    #[test]
    fn sort_mismatch() {
        let src = "record Two (A : Set) (B : Set) : Set where field\n a : A\n b : B\n bad : a == b";
        assert_eq!(kinds(src), [ErrorKind::SortMismatch]);
        let src = "record M (A : Set) : Set where field\n f : A → A\n g : {x : A} → f A == x";
        assert_eq!(kinds(src), [ErrorKind::SortMismatch]);
    }

    #[test]
    fn projections_and_instances() {
        let src = format!(
            "{MONOID}\nrecord H (A1 : Set) (A2 : Set) (Mo1 : Monoid A1) (Mo2 : Monoid A2) : Set where field\n  \
             h : A1 → A2\n  p : (x : A1) → h (op Mo1 x x) == op Mo2 (h x) (h x)\n  \
             bad : (x : A1) → h x == e Mo1"
        );
        let errs = check_module(&parse_file(&src).unwrap());
        assert_eq!(
            errs.iter().map(|e| e.kind).collect::<Vec<_>>(),
            [ErrorKind::SortMismatch]
        );
        let src = format!("{MONOID}\nrecord H (A1 : Set) (Mo1 : Monoid) : Set where");
        assert_eq!(kinds(&src), [ErrorKind::ArityMismatch]);
    }

    #[test]
    fn sort_as_field_projection() {
        let src = "record Pt : Set where field\n  A : Set\n  e : A\n\n\
                   record H (P1 : Pt) (P2 : Pt) : Set where field\n  h : A P1 → A P2\n  p : h (e P1) == e P2\n  q : h (e P1) == e P1";
        assert_eq!(kinds(src), [ErrorKind::SortMismatch]);
    }

    #[test]
    fn data_constructors_must_build_their_type() {
        let ok = "data L (V : Set) : Set where\n  v : V → L V\n  n : L V";
        assert_eq!(kinds(ok), []);
        let bad = "data L (V : Set) : Set where\n  v : V → V";
        assert_eq!(kinds(bad), [ErrorKind::SortMismatch]);
    }

    #[test]
    fn parametric_constructors_in_terms() {
        let src = "data Prod (A : Set) (B : Set) : Set where\n  pair : A → B → Prod A B\n\n\
                   record R (A : Set) : Set where field\n  e : A\n  p : Prod A A\n  ok : pair e e == p\n  bad : pair e p == p";
        assert_eq!(kinds(src), [ErrorKind::SortMismatch]);
    }

    #[test]
    fn no_cascade_from_unbound_subterm() {
        let src =
            "record M (A : Set) : Set where field\n op : A → A → A\n u : {x : A} → op (g x) x == x";
        assert_eq!(kinds(src), [ErrorKind::UnboundName]);
    }

    #[test]
    fn all_errors_reported_in_position_order() {
        let src = "record M (A : Set) : Set where field\n e : B\n e : A\n op : A → A\n u : op == e";
        let errs = check_module(&parse_file(src).unwrap());
        let ks: Vec<_> = errs.iter().map(|e| e.kind).collect();
        assert_eq!(
            ks,
            [
                ErrorKind::UnboundName,
                ErrorKind::DuplicateField,
                ErrorKind::ArityMismatch
            ]
        );
        assert!(errs
            .windows(2)
            .all(|w| (w[0].pos.line, w[0].pos.col) <= (w[1].pos.line, w[1].pos.col)));
    }

    #[test]
    fn field_order_does_not_change_error_set() {
        let a = "record M (A : Set) : Set where field\n e : A\n f : A → A\n x1 : f e == f\n x2 : e == f e e";
        let b = "record M (A : Set) : Set where field\n f : A → A\n e : A\n x2 : e == f e e\n x1 : f e == f";
        let set = |s: &str| {
            let mut k: Vec<_> = kinds(s);
            k.sort();
            k
        };
        assert_eq!(set(a), set(b));
    }

    #[test]
    fn report_format() {
        let errs = check_module(
            &parse_file("record P (A : Set) : Set where field\n  e : A\n  e : A").unwrap(),
        );
        assert_eq!(
            format_report("p.eqt", &errs),
            "p.eqt:3:3: DuplicateField: field `e` is already defined in this module\n"
        );
    }
}
