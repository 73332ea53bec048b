//! The internal form of a single-sorted equational theory, its extraction from
//! a record declaration, and the systematic renaming every generator uses.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{Binder, Constr, Name, RecordDecl, Term, TypeExpr};

/// A quantified equation `binders → lhs == rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub name: Name,
    pub binders: Vec<Binder>,
    pub lhs: Term,
    pub rhs: Term,
}

impl Axiom {
    /// Bound variables with their types, in binding order.
    pub fn vars(&self) -> Vec<(Name, TypeExpr)> {
        self.binders
            .iter()
            .flat_map(|b| b.names.iter().map(move |n| (n.clone(), b.ty.clone())))
            .collect()
    }

    pub fn to_type(&self) -> TypeExpr {
        TypeExpr::pi(
            self.binders.clone(),
            TypeExpr::Eq(self.lhs.clone(), self.rhs.clone()),
        )
    }

    pub fn to_constr(&self) -> Constr {
        Constr::new(self.name.clone(), self.to_type())
    }
}

/// `(S, F, E)` plus the theory name, its record constructor and the waist:
/// how many leading telescope entries (sort, then function symbols, then
/// axioms) are record parameters rather than fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EqTheory {
    pub name: Name,
    pub constructor: Name,
    pub sort: Constr,
    pub func_types: Vec<Constr>,
    pub axioms: Vec<Axiom>,
    pub waist: usize,
}

/// Number of arguments of a curried function type.
pub fn arity_of(ty: &TypeExpr) -> usize {
    ty.uncurry().0.len()
}

impl EqTheory {
    pub fn sort_name(&self) -> &Name {
        &self.sort.name
    }

    /// Sort, function symbols and axioms in telescope order.
    pub fn telescope(&self) -> Vec<Constr> {
        std::iter::once(self.sort.clone())
            .chain(self.func_types.iter().cloned())
            .chain(self.axioms.iter().map(Axiom::to_constr))
            .collect()
    }

    pub fn declared_names(&self) -> Vec<Name> {
        self.telescope().into_iter().map(|c| c.name).collect()
    }

    pub fn func(&self, name: &Name) -> Option<&Constr> {
        self.func_types.iter().find(|f| &f.name == name)
    }

    pub fn arity(&self, name: &Name) -> Option<usize> {
        self.func(name).map(|f| arity_of(&f.ty))
    }

    /// Whether the named declaration sits inside the waist.
    pub fn is_param(&self, name: &Name) -> bool {
        self.declared_names()
            .iter()
            .position(|n| n == name)
            .is_some_and(|i| i < self.waist)
    }

    pub fn constants(&self) -> impl Iterator<Item = &Constr> {
        self.func_types.iter().filter(|f| arity_of(&f.ty) == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("theory `{0}` declares no sort")]
    NoSort(Name),
    #[error("`{second}` is a second sort (`{first}` was declared first)")]
    MultipleSorts { first: Name, second: Name },
    #[error("`{0}` takes a function as an argument")]
    HigherOrder(Name),
    #[error("`{0}` is neither a function symbol over the sort nor an equation")]
    NotEquational(Name),
    #[error("axiom `{axiom}` is ill-sorted: {detail}")]
    IllSorted { axiom: Name, detail: String },
    #[error("parameter `{0}` is not part of a telescope prefix (sort, then symbols, then axioms)")]
    WaistNotPrefix(Name),
}

enum Entry {
    Sort,
    Func,
    Axiom(Axiom),
}

/// Reads an [`EqTheory`] off a record declaration.
pub fn extract(d: &RecordDecl) -> Result<EqTheory, ShapeError> {
    let params: Vec<Constr> = d
        .params
        .iter()
        .flat_map(|b| {
            b.names
                .iter()
                .map(move |n| Constr::new(n.clone(), b.ty.clone()))
        })
        .collect();
    let waist = params.len();

    let mut sort: Option<Constr> = None;
    let mut funcs: Vec<Constr> = Vec::new();
    let mut axioms: Vec<Axiom> = Vec::new();
    let mut order: Vec<Name> = Vec::new();

    for c in params.iter().chain(d.fields.iter()) {
        match classify(c, sort.as_ref().map(|s| &s.name), &funcs)? {
            Entry::Sort => {
                if let Some(first) = &sort {
                    return Err(ShapeError::MultipleSorts {
                        first: first.name.clone(),
                        second: c.name.clone(),
                    });
                }
                sort = Some(c.clone());
            }
            Entry::Func => funcs.push(c.clone()),
            Entry::Axiom(ax) => axioms.push(ax),
        }
        order.push(c.name.clone());
    }

    let sort = sort.ok_or_else(|| ShapeError::NoSort(d.name.clone()))?;
    let t = EqTheory {
        name: d.name.clone(),
        constructor: d.constructor.clone(),
        sort,
        func_types: funcs,
        axioms,
        waist,
    };
    let normalized = t.declared_names();
    for (given, expected) in order.iter().zip(&normalized).take(waist) {
        if given != expected {
            return Err(ShapeError::WaistNotPrefix(given.clone()));
        }
    }
    Ok(t)
}

fn classify(c: &Constr, sort: Option<&Name>, funcs: &[Constr]) -> Result<Entry, ShapeError> {
    match &c.ty {
        TypeExpr::Set(_) => Ok(Entry::Sort),
        TypeExpr::Sort(_) | TypeExpr::Arrow(..) => {
            let (doms, cod) = c.ty.uncurry();
            for part in doms.iter().copied().chain(std::iter::once(cod)) {
                match part {
                    TypeExpr::Sort(s) if Some(s) == sort => {}
                    TypeExpr::Arrow(..) | TypeExpr::Pi(..) => {
                        return Err(ShapeError::HigherOrder(c.name.clone()))
                    }
                    _ => return Err(ShapeError::NotEquational(c.name.clone())),
                }
            }
            Ok(Entry::Func)
        }
        TypeExpr::Pi(..) | TypeExpr::Eq(..) => {
            let mut binders = Vec::new();
            let mut body = &c.ty;
            while let TypeExpr::Pi(bs, inner) = body {
                binders.extend(bs.iter().cloned());
                body = inner;
            }
            let TypeExpr::Eq(lhs, rhs) = body else {
                return Err(ShapeError::NotEquational(c.name.clone()));
            };
            let ill = |detail: String| ShapeError::IllSorted {
                axiom: c.name.clone(),
                detail,
            };
            for b in &binders {
                if !matches!(&b.ty, TypeExpr::Sort(s) if Some(s) == sort) {
                    return Err(ill(format!(
                        "variables {} are not quantified over the sort",
                        b.names
                            .iter()
                            .map(|n| format!("`{n}`"))
                            .collect::<Vec<_>>()
                            .join(" ")
                    )));
                }
            }
            let arities: BTreeMap<&Name, usize> =
                funcs.iter().map(|f| (&f.name, arity_of(&f.ty))).collect();
            check_sorted(lhs, &arities).map_err(ill)?;
            check_sorted(rhs, &arities).map_err(ill)?;
            let bound: BTreeSet<&Name> = binders.iter().flat_map(|b| &b.names).collect();
            let mut unbound = None;
            for side in [lhs, rhs] {
                side.for_each_leaf(&mut |leaf| {
                    if let Term::Var(v) = leaf {
                        if !bound.contains(v) && unbound.is_none() {
                            unbound = Some(v.clone());
                        }
                    }
                });
            }
            if let Some(v) = unbound {
                return Err(ill(format!("variable `{v}` is not bound")));
            }
            Ok(Entry::Axiom(Axiom {
                name: c.name.clone(),
                binders,
                lhs: lhs.clone(),
                rhs: rhs.clone(),
            }))
        }
        TypeExpr::App(..) => Err(ShapeError::NotEquational(c.name.clone())),
    }
}

/// Every application is a declared symbol applied to exactly its arity.
fn check_sorted(t: &Term, arities: &BTreeMap<&Name, usize>) -> Result<(), String> {
    let (head, args) = t.spine();
    match head {
        Term::Var(v) if args.is_empty() => Ok(()),
        Term::Var(v) => Err(format!("variable `{v}` is applied to arguments")),
        Term::Sym(f) => {
            let arity = arities
                .get(f)
                .ok_or_else(|| format!("`{f}` is not a function symbol declared earlier"))?;
            if *arity != args.len() {
                return Err(format!(
                    "`{f}` expects {arity} arguments, got {}",
                    args.len()
                ));
            }
            args.into_iter().try_for_each(|a| check_sorted(a, arities))
        }
        Term::App(..) => unreachable!(),
    }
}

/// How axiom names change under a renaming.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AxiomRule {
    #[default]
    Keep,
    /// Append the scheme suffix.
    Suffix,
    /// `associative_<op'>` for associativity, `<name>_<c'>` for axioms that
    /// mention a constant `c`, otherwise the suffix.
    Distinguished,
}

/// A renaming of a theory's declared names. Explicit `mapping` entries win;
/// other sort and symbol names get `suffix`. Bound variables always get
/// `suffix`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RenameScheme {
    pub suffix: String,
    pub axiom_rule: AxiomRule,
    pub mapping: BTreeMap<Name, Name>,
}

impl RenameScheme {
    pub fn identity() -> Self {
        RenameScheme::default()
    }

    pub fn suffix(suffix: impl Into<String>, axiom_rule: AxiomRule) -> Self {
        RenameScheme {
            suffix: suffix.into(),
            axiom_rule,
            mapping: BTreeMap::new(),
        }
    }

    pub fn mapping(mapping: BTreeMap<Name, Name>) -> Self {
        RenameScheme {
            mapping,
            ..RenameScheme::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RenameError {
    #[error("renaming produces the name `{0}` twice")]
    Collision(Name),
    #[error("renaming mentions `{0}`, which the theory does not declare")]
    Unknown(Name),
}

/// If `ax` states associativity of a binary symbol, returns that symbol.
pub fn associativity_of(ax: &Axiom) -> Option<&Name> {
    fn split(t: &Term) -> Option<(&Name, &Term, &Term)> {
        match t.spine() {
            (Term::Sym(f), args) if args.len() == 2 => Some((f, args[0], args[1])),
            _ => None,
        }
    }
    fn var(t: &Term) -> Option<&Name> {
        match t {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }
    // f x (f y z)
    let right = |t| -> Option<(&Name, [&Name; 3])> {
        let (f, x, r) = split(t)?;
        let (g, y, z) = split(r)?;
        (f == g).then_some(())?;
        Some((f, [var(x)?, var(y)?, var(z)?]))
    };
    // f (f x y) z
    let left = |t| -> Option<(&Name, [&Name; 3])> {
        let (f, l, z) = split(t)?;
        let (g, x, y) = split(l)?;
        (f == g).then_some(())?;
        Some((f, [var(x)?, var(y)?, var(z)?]))
    };
    let (f, vs, g, ws) = match (right(&ax.lhs), left(&ax.rhs)) {
        (Some((f, vs)), Some((g, ws))) => (f, vs, g, ws),
        _ => {
            let (f, vs) = left(&ax.lhs)?;
            let (g, ws) = right(&ax.rhs)?;
            (f, vs, g, ws)
        }
    };
    let distinct = vs[0] != vs[1] && vs[1] != vs[2] && vs[0] != vs[2];
    (f == g && vs == ws && distinct).then_some(f)
}

/// First nullary symbol occurring in the axiom, left side first.
fn first_constant<'a>(ax: &'a Axiom, t: &EqTheory) -> Option<&'a Name> {
    let mut found = None;
    for side in [&ax.lhs, &ax.rhs] {
        side.for_each_leaf(&mut |leaf| {
            if let Term::Sym(s) = leaf {
                if found.is_none() && t.arity(s) == Some(0) {
                    found = Some(s);
                }
            }
        });
    }
    found
}

/// Applies `scheme` to every declared name, binder and term of `t`.
pub fn rename(t: &EqTheory, scheme: &RenameScheme) -> Result<EqTheory, RenameError> {
    let declared = t.declared_names();
    if let Some(unknown) = scheme.mapping.keys().find(|k| !declared.contains(k)) {
        return Err(RenameError::Unknown(unknown.clone()));
    }

    let symbol = |n: &Name| -> Name {
        match scheme.mapping.get(n) {
            Some(m) => Name::at(m.as_str(), n.pos),
            None => n.suffixed(&scheme.suffix),
        }
    };
    let syms: BTreeMap<Name, Name> = std::iter::once(&t.sort)
        .chain(&t.func_types)
        .map(|c| (c.name.clone(), symbol(&c.name)))
        .collect();
    let ren_sym = |n: &Name| -> Name {
        syms.get(n)
            .map(|m| Name::at(m.as_str(), n.pos))
            .unwrap_or_else(|| n.clone())
    };
    let ren_ty = |ty: &TypeExpr| rename_type(ty, &ren_sym);
    let ren_term = |tm: &Term| -> Term {
        tm.map_names(&mut |leaf| match leaf {
            Term::Var(v) => Term::Var(v.suffixed(&scheme.suffix)),
            Term::Sym(s) => Term::Sym(ren_sym(s)),
            Term::App(..) => unreachable!(),
        })
    };

    let axiom_name = |ax: &Axiom| -> Name {
        if let Some(m) = scheme.mapping.get(&ax.name) {
            return Name::at(m.as_str(), ax.name.pos);
        }
        match scheme.axiom_rule {
            AxiomRule::Keep => ax.name.clone(),
            AxiomRule::Suffix => ax.name.suffixed(&scheme.suffix),
            AxiomRule::Distinguished => {
                if let Some(op) = associativity_of(ax) {
                    Name::at(format!("associative_{}", ren_sym(op)), ax.name.pos)
                } else if let Some(c) = first_constant(ax, t) {
                    ax.name.suffixed(&format!("_{}", ren_sym(c)))
                } else {
                    ax.name.suffixed(&scheme.suffix)
                }
            }
        }
    };

    let out = EqTheory {
        name: t.name.clone(),
        constructor: t.constructor.clone(),
        sort: Constr::new(ren_sym(&t.sort.name), t.sort.ty.clone()),
        func_types: t
            .func_types
            .iter()
            .map(|f| Constr::new(ren_sym(&f.name), ren_ty(&f.ty)))
            .collect(),
        axioms: t
            .axioms
            .iter()
            .map(|ax| Axiom {
                name: axiom_name(ax),
                binders: ax
                    .binders
                    .iter()
                    .map(|b| Binder {
                        names: b.names.iter().map(|n| n.suffixed(&scheme.suffix)).collect(),
                        ty: ren_ty(&b.ty),
                        hidden: b.hidden,
                    })
                    .collect(),
                lhs: ren_term(&ax.lhs),
                rhs: ren_term(&ax.rhs),
            })
            .collect(),
        waist: t.waist,
    };

    let mut seen = BTreeSet::new();
    for n in out.declared_names() {
        if !seen.insert(n.clone()) {
            return Err(RenameError::Collision(n));
        }
    }
    for ax in &out.axioms {
        if let Some((v, _)) = ax.vars().into_iter().find(|(v, _)| seen.contains(v)) {
            return Err(RenameError::Collision(v));
        }
    }
    Ok(out)
}

/// Renames sort and type-constructor names inside a type.
pub(crate) fn rename_type(ty: &TypeExpr, f: &impl Fn(&Name) -> Name) -> TypeExpr {
    match ty {
        TypeExpr::Set(p) => TypeExpr::Set(*p),
        TypeExpr::Sort(n) => TypeExpr::Sort(f(n)),
        TypeExpr::App(h, args) => {
            TypeExpr::App(f(h), args.iter().map(|a| rename_type(a, f)).collect())
        }
        TypeExpr::Arrow(d, c) => TypeExpr::arrow(rename_type(d, f), rename_type(c, f)),
        TypeExpr::Pi(bs, body) => TypeExpr::Pi(
            bs.iter()
                .map(|b| Binder {
                    ty: rename_type(&b.ty, f),
                    ..b.clone()
                })
                .collect(),
            Box::new(rename_type(body, f)),
        ),
        TypeExpr::Eq(l, r) => TypeExpr::Eq(l.clone(), r.clone()),
    }
}

/// Turns a theory back into a record: the first `waist` telescope entries
/// become explicit parameters, the rest fields.
pub fn embed(t: &EqTheory) -> RecordDecl {
    let mut telescope = t.telescope().into_iter();
    let params = telescope
        .by_ref()
        .take(t.waist)
        .map(|c| Binder::explicit(c.name, c.ty))
        .collect();
    RecordDecl {
        name: t.name.clone(),
        params,
        constructor: t.constructor.clone(),
        fields: telescope.collect(),
    }
}
