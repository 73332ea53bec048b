//! Derived constructions over an [`EqTheory`]: signature, product algebra,
//! closed and open term languages, and the homomorphism family.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::eqtheory::{embed, rename, Axiom, AxiomRule, EqTheory, RenameError, RenameScheme};
use crate::syntax::{Binder, Constr, DataDecl, Decl, Name, RecordDecl, Term, TypeExpr};

/// The construction catalog, in emission order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    Signature,
    Product,
    TermLang,
    OpenTermLang,
    /// Evaluation into a model. Lives in [`crate::engine`]; no declaration.
    Evaluator,
    Hom,
    Monomorphism,
    Endomorphism,
}

impl GenKind {
    pub const ALL: [GenKind; 8] = [
        GenKind::Signature,
        GenKind::Product,
        GenKind::TermLang,
        GenKind::OpenTermLang,
        GenKind::Evaluator,
        GenKind::Hom,
        GenKind::Monomorphism,
        GenKind::Endomorphism,
    ];

    /// `sig,prod,termlang,hom`.
    pub fn defaults() -> Vec<GenKind> {
        vec![
            GenKind::Signature,
            GenKind::Product,
            GenKind::TermLang,
            GenKind::Hom,
        ]
    }

    pub fn cli_name(self) -> &'static str {
        match self {
            GenKind::Signature => "sig",
            GenKind::Product => "prod",
            GenKind::TermLang => "termlang",
            GenKind::OpenTermLang => "open-termlang",
            GenKind::Evaluator => "eval",
            GenKind::Hom => "hom",
            GenKind::Monomorphism => "mono",
            GenKind::Endomorphism => "endo",
        }
    }

    /// Suffix appended to the theory name for the emitted declaration.
    pub fn decl_suffix(self) -> &'static str {
        match self {
            GenKind::Signature => "Sig",
            GenKind::Product => "Prod",
            GenKind::TermLang => "Lang",
            GenKind::OpenTermLang => "OpenLang",
            GenKind::Evaluator => "Eval",
            GenKind::Hom => "Hom",
            GenKind::Monomorphism => "Mono",
            GenKind::Endomorphism => "End",
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GenKind::ALL
            .into_iter()
            .find(|k| k.cli_name() == s)
            .ok_or_else(|| format!("unknown construction `{s}`"))
    }
}

/// Field-name suffixes that keep generated names apart from the input's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suffixes {
    pub sig: String,
    pub prod: String,
    pub lang: String,
    pub open_lang: String,
}

impl Default for Suffixes {
    fn default() -> Self {
        Suffixes {
            sig: "S".into(),
            prod: "P".into(),
            lang: "L".into(),
            open_lang: "OL".into(),
        }
    }
}

impl Suffixes {
    pub fn get_mut(&mut self, kind: GenKind) -> Option<&mut String> {
        match kind {
            GenKind::Signature => Some(&mut self.sig),
            GenKind::Product => Some(&mut self.prod),
            GenKind::TermLang => Some(&mut self.lang),
            GenKind::OpenTermLang => Some(&mut self.open_lang),
            _ => None,
        }
    }

    /// Suffixes must be nonempty, pairwise distinct and usable inside names.
    pub fn validate(&self) -> Result<(), String> {
        let all = [&self.sig, &self.prod, &self.lang, &self.open_lang];
        for s in all {
            if s.is_empty() || Name::try_new(format!("x{s}")).is_err() {
                return Err(format!("invalid suffix `{s}`"));
            }
        }
        let distinct: BTreeSet<_> = all.iter().collect();
        if distinct.len() != all.len() {
            return Err("suffixes must be pairwise distinct".into());
        }
        Ok(())
    }
}

/// Machine-chosen names for the homomorphism family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomNaming {
    pub carriers: (Name, Name),
    pub instances: (Name, Name),
    pub func: Name,
    pub pres_prefix: String,
}

fn primed_until(base: String, taken: impl Fn(&str) -> bool) -> String {
    let mut base = base;
    while taken(&base) {
        base.push('\'');
    }
    base
}

impl HomNaming {
    /// Carriers from the sort name (`A1`, `A2`), instances from the first two
    /// characters of the theory name (`Mo1`, `Mo2`), primed on collision.
    pub fn derive(t: &EqTheory) -> Self {
        let mut taken: BTreeSet<String> = t
            .declared_names()
            .iter()
            .chain([&t.name])
            .map(|n| n.to_string())
            .collect();
        for c in t.telescope().iter().take(t.waist).skip(1) {
            taken.insert(format!("{}1", c.name));
            taken.insert(format!("{}2", c.name));
        }

        let sort = primed_until(t.sort_name().to_string(), |b| {
            taken.contains(&format!("{b}1")) || taken.contains(&format!("{b}2"))
        });
        taken.insert(format!("{sort}1"));
        taken.insert(format!("{sort}2"));

        let prefix: String = t.name.as_str().chars().take(2).collect();
        let prefix = primed_until(prefix, |b| {
            taken.contains(&format!("{b}1")) || taken.contains(&format!("{b}2"))
        });

        HomNaming {
            carriers: (Name::new(format!("{sort}1")), Name::new(format!("{sort}2"))),
            instances: (
                Name::new(format!("{prefix}1")),
                Name::new(format!("{prefix}2")),
            ),
            func: Name::new("hom"),
            pres_prefix: "pres-".into(),
        }
    }

    pub fn with_func(self, func: &str, pres_prefix: &str) -> Self {
        HomNaming {
            func: Name::new(func),
            pres_prefix: pres_prefix.into(),
            ..self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenError {
    #[error(transparent)]
    Rename(#[from] RenameError),
    #[error("the evaluator is provided by the term engine and has no declaration form")]
    EngineOnly,
    #[error("generated name `{0}` clashes with another declaration in the module")]
    NameClash(Name),
}

pub const PROD: &str = "Prod";

fn prod_of(sort: &Name) -> TypeExpr {
    TypeExpr::App(
        Name::new(PROD),
        vec![TypeExpr::Sort(sort.clone()), TypeExpr::Sort(sort.clone())],
    )
}

/// `data Prod (A : Set) (B : Set) : Set where pair : A → B → Prod A B`,
/// emitted once per module that uses product algebras.
pub fn prod_prelude() -> Decl {
    let (a, b) = (TypeExpr::sort("A"), TypeExpr::sort("B"));
    Decl::Data(DataDecl {
        name: Name::new(PROD),
        params: vec![
            Binder::explicit(Name::new("A"), TypeExpr::set()),
            Binder::explicit(Name::new("B"), TypeExpr::set()),
        ],
        constructors: vec![Constr::new(
            Name::new("pair"),
            TypeExpr::arrows(
                [a.clone(), b.clone()],
                TypeExpr::App(Name::new(PROD), vec![a, b]),
            ),
        )],
    })
}

/// Replaces the sort `from` by `to` in type positions.
fn replace_sort(ty: &TypeExpr, from: &Name, to: &TypeExpr) -> TypeExpr {
    match ty {
        TypeExpr::Sort(n) if n == from => to.clone(),
        TypeExpr::Set(_) | TypeExpr::Sort(_) | TypeExpr::Eq(..) => ty.clone(),
        TypeExpr::App(h, args) => TypeExpr::App(
            h.clone(),
            args.iter().map(|a| replace_sort(a, from, to)).collect(),
        ),
        TypeExpr::Arrow(d, c) => {
            TypeExpr::arrow(replace_sort(d, from, to), replace_sort(c, from, to))
        }
        TypeExpr::Pi(bs, body) => TypeExpr::Pi(
            bs.iter()
                .map(|b| Binder {
                    ty: replace_sort(&b.ty, from, to),
                    ..b.clone()
                })
                .collect(),
            Box::new(replace_sort(body, from, to)),
        ),
    }
}

/// Renames type heads and term symbols through `map`; variables are untouched.
fn subst_names(ty: &TypeExpr, map: &BTreeMap<Name, Name>) -> TypeExpr {
    let get = |n: &Name| map.get(n).cloned().unwrap_or_else(|| n.clone());
    let term = |t: &Term| {
        t.map_names(&mut |leaf| match leaf {
            Term::Sym(s) => Term::Sym(get(s)),
            other => other.clone(),
        })
    };
    match ty {
        TypeExpr::Set(_) => ty.clone(),
        TypeExpr::Sort(n) => TypeExpr::Sort(get(n)),
        TypeExpr::App(h, args) => {
            TypeExpr::App(get(h), args.iter().map(|a| subst_names(a, map)).collect())
        }
        TypeExpr::Arrow(d, c) => TypeExpr::arrow(subst_names(d, map), subst_names(c, map)),
        TypeExpr::Pi(bs, body) => TypeExpr::Pi(
            bs.iter()
                .map(|b| Binder {
                    ty: subst_names(&b.ty, map),
                    ..b.clone()
                })
                .collect(),
            Box::new(subst_names(body, map)),
        ),
        TypeExpr::Eq(l, r) => TypeExpr::Eq(term(l), term(r)),
    }
}

fn derived_theory(t: &EqTheory, renamed: EqTheory, kind: GenKind) -> EqTheory {
    let name = t.name.suffixed(kind.decl_suffix());
    EqTheory {
        constructor: name.suffixed("C"),
        name,
        ..renamed
    }
}

/// `XSig`: the axiom-free part, every name suffixed.
pub fn gen_signature(t: &EqTheory, suffixes: &Suffixes) -> Result<EqTheory, GenError> {
    let axiom_free = EqTheory {
        axioms: vec![],
        waist: t.waist.min(1 + t.func_types.len()),
        ..t.clone()
    };
    let renamed = rename(
        &axiom_free,
        &RenameScheme::suffix(&suffixes.sig, AxiomRule::Suffix),
    )?;
    Ok(derived_theory(t, renamed, GenKind::Signature))
}

/// `XProd`: every occurrence of the sort becomes `Prod S S`, axiom binders
/// become one explicit binder per variable.
pub fn gen_product(t: &EqTheory, suffixes: &Suffixes) -> Result<EqTheory, GenError> {
    let renamed = rename(
        t,
        &RenameScheme::suffix(&suffixes.prod, AxiomRule::Distinguished),
    )?;
    let sort = renamed.sort.name.clone();
    let prod = prod_of(&sort);
    let func_types = renamed
        .func_types
        .iter()
        .map(|f| Constr::new(f.name.clone(), replace_sort(&f.ty, &sort, &prod)))
        .collect();
    let axioms = renamed
        .axioms
        .iter()
        .map(|ax| Axiom {
            binders: ax
                .vars()
                .into_iter()
                .map(|(v, ty)| Binder::explicit(v, replace_sort(&ty, &sort, &prod)))
                .collect(),
            ..ax.clone()
        })
        .collect();
    let product = EqTheory {
        func_types,
        axioms,
        ..renamed
    };
    Ok(derived_theory(t, product, GenKind::Product))
}

fn lang_constructors(t: &EqTheory, suffix: &str, lang_ty: &TypeExpr) -> Vec<Constr> {
    t.func_types
        .iter()
        .map(|f| {
            Constr::new(
                f.name.suffixed(suffix),
                replace_sort(&f.ty, t.sort_name(), lang_ty),
            )
        })
        .collect()
}

/// `data XLang : Set`: one constructor per function symbol, axioms dropped.
pub fn gen_termlang(t: &EqTheory, suffixes: &Suffixes) -> DataDecl {
    let name = t.name.suffixed(GenKind::TermLang.decl_suffix());
    let lang_ty = TypeExpr::Sort(name.clone());
    DataDecl {
        constructors: lang_constructors(t, &suffixes.lang, &lang_ty),
        name,
        params: vec![],
    }
}

/// `data XOpenLang (V : Set) : Set`: the term language over variables `V`.
pub fn gen_open_termlang(t: &EqTheory, suffixes: &Suffixes) -> DataDecl {
    let name = t.name.suffixed(GenKind::OpenTermLang.decl_suffix());
    let vars = Name::new("V");
    let lang_ty = TypeExpr::App(name.clone(), vec![TypeExpr::Sort(vars.clone())]);
    let ops = lang_constructors(t, &suffixes.open_lang, &lang_ty);
    let taken: BTreeSet<String> = ops
        .iter()
        .map(|c| c.name.to_string())
        .chain(t.declared_names().iter().map(|n| n.to_string()))
        .collect();
    let var_ctor = Name::new(primed_until("v".into(), |b| taken.contains(b)));
    let mut constructors = vec![Constr::new(
        var_ctor,
        TypeExpr::arrow(TypeExpr::Sort(vars.clone()), lang_ty),
    )];
    constructors.extend(ops);
    DataDecl {
        name,
        params: vec![Binder::explicit(vars, TypeExpr::set())],
        constructors,
    }
}

/// One lifted copy of the theory: its parameters and how to refer to the
/// carrier and each function symbol.
struct Copy {
    params: Vec<Binder>,
    instance: Binder,
    carrier: TypeExpr,
    symbols: BTreeMap<Name, Term>,
}

fn lift(t: &EqTheory, naming: &HomNaming, index: usize) -> Copy {
    let (carrier_name, inst) = if index == 1 {
        (&naming.carriers.0, &naming.instances.0)
    } else {
        (&naming.carriers.1, &naming.instances.1)
    };
    let mut renaming = BTreeMap::new();
    let mut params = Vec::new();
    for (k, c) in t.telescope().into_iter().take(t.waist).enumerate() {
        let lifted = if k == 0 {
            carrier_name.clone()
        } else {
            c.name.suffixed(&index.to_string())
        };
        params.push(Binder::explicit(
            lifted.clone(),
            subst_names(&c.ty, &renaming),
        ));
        renaming.insert(c.name, lifted);
    }
    let instance_ty = TypeExpr::app(
        t.name.clone(),
        params
            .iter()
            .map(|b| TypeExpr::Sort(b.names[0].clone()))
            .collect(),
    );
    let carrier = if t.waist > 0 {
        TypeExpr::Sort(carrier_name.clone())
    } else {
        TypeExpr::App(t.sort_name().clone(), vec![TypeExpr::Sort(inst.clone())])
    };
    let symbols = t
        .func_types
        .iter()
        .map(|f| {
            let head = match renaming.get(&f.name) {
                Some(lifted) => Term::Sym(lifted.clone()),
                None => Term::apply(Term::Sym(f.name.clone()), [Term::Sym(inst.clone())]),
            };
            (f.name.clone(), head)
        })
        .collect();
    Copy {
        params,
        instance: Binder::explicit(inst.clone(), instance_ty),
        carrier,
        symbols,
    }
}

/// A variable base that no symbol in the generated record can shadow.
fn var_base(t: &EqTheory, naming: &HomNaming, copies: &[&Copy]) -> String {
    let mut taken: BTreeSet<String> = t.declared_names().iter().map(|n| n.to_string()).collect();
    taken.insert(naming.func.to_string());
    for c in copies {
        taken.insert(c.instance.names[0].to_string());
        taken.extend(c.params.iter().map(|b| b.names[0].to_string()));
    }
    primed_until("x".into(), |b| {
        (0..=9).any(|i| taken.contains(&format!("{b}{i}"))) || taken.contains(b)
    })
}

fn hom_fields(t: &EqTheory, naming: &HomNaming, src: &Copy, dst: &Copy) -> Vec<Constr> {
    let hom = Term::Sym(naming.func.clone());
    let base = var_base(t, naming, &[src, dst]);
    let mut fields = vec![Constr::new(
        naming.func.clone(),
        TypeExpr::arrow(src.carrier.clone(), dst.carrier.clone()),
    )];
    for f in &t.func_types {
        let arity = crate::eqtheory::arity_of(&f.ty);
        let vars: Vec<Name> = (1..=arity)
            .map(|i| Name::new(format!("{base}{i}")))
            .collect();
        let binders = vars
            .iter()
            .map(|v| Binder::explicit(v.clone(), src.carrier.clone()))
            .collect();
        let lhs = Term::apply(
            hom.clone(),
            [Term::apply(
                src.symbols[&f.name].clone(),
                vars.iter().cloned().map(Term::Var),
            )],
        );
        let rhs = Term::apply(
            dst.symbols[&f.name].clone(),
            vars.iter()
                .map(|v| Term::apply(hom.clone(), [Term::Var(v.clone())])),
        );
        fields.push(Constr::new(
            Name::new(format!("{}{}", naming.pres_prefix, f.name)),
            TypeExpr::pi(binders, TypeExpr::Eq(lhs, rhs)),
        ));
    }
    fields
}

fn hom_record(t: &EqTheory, kind: GenKind, params: Vec<Binder>, fields: Vec<Constr>) -> RecordDecl {
    let name = t.name.suffixed(kind.decl_suffix());
    RecordDecl {
        constructor: name.suffixed("C"),
        name,
        params,
        fields,
    }
}

/// `XHom`: a carrier map between two instances preserving every operation.
pub fn gen_hom(t: &EqTheory, naming: &HomNaming) -> RecordDecl {
    let (src, dst) = (lift(t, naming, 1), lift(t, naming, 2));
    let fields = hom_fields(t, naming, &src, &dst);
    let params = src
        .params
        .iter()
        .chain(&dst.params)
        .cloned()
        .chain([src.instance.clone(), dst.instance.clone()])
        .collect();
    hom_record(t, GenKind::Hom, params, fields)
}

/// `XMono`: a homomorphism plus injectivity.
pub fn gen_monomorphism(t: &EqTheory, naming: &HomNaming) -> RecordDecl {
    let mut rec = gen_hom(t, naming);
    let src = lift(t, naming, 1);
    let hom = Term::Sym(naming.func.clone());
    let base = var_base(t, naming, &[&src]);
    let (x, y) = (Name::new(&base), Name::new(format!("{base}'")));
    let app = |v: &Name| Term::apply(hom.clone(), [Term::Var(v.clone())]);
    rec.fields.push(Constr::new(
        Name::new("injective"),
        TypeExpr::Pi(
            vec![Binder {
                names: vec![x.clone(), y.clone()],
                ty: src.carrier.clone(),
                hidden: false,
            }],
            Box::new(TypeExpr::arrow(
                TypeExpr::Eq(app(&x), app(&y)),
                TypeExpr::Eq(Term::Var(x), Term::Var(y)),
            )),
        ),
    ));
    rec.name = t.name.suffixed(GenKind::Monomorphism.decl_suffix());
    rec.constructor = rec.name.suffixed("C");
    rec
}

/// `XEnd`: a homomorphism from one instance to itself.
pub fn gen_endomorphism(t: &EqTheory, naming: &HomNaming) -> RecordDecl {
    let src = lift(t, naming, 1);
    let fields = hom_fields(t, naming, &src, &src);
    let params = src
        .params
        .iter()
        .cloned()
        .chain([src.instance.clone()])
        .collect();
    hom_record(t, GenKind::Endomorphism, params, fields)
}

/// Every name a declaration contributes to the module-wide namespace.
pub fn global_names(d: &Decl) -> Vec<Name> {
    let mut out = vec![d.name().clone()];
    if let Decl::Record(r) = d {
        out.push(r.constructor.clone());
    }
    out.extend(d.entries().iter().map(|c| c.name.clone()));
    out
}

/// Runs the selected generators in catalog order. Hom, monomorphism and
/// endomorphism use distinct function names (`hom`, `mono`, `endo`) so that
/// they can share a module.
pub fn gen_all(
    t: &EqTheory,
    kinds: &[GenKind],
    suffixes: &Suffixes,
) -> Result<Vec<Decl>, GenError> {
    let kinds: BTreeSet<GenKind> = kinds.iter().copied().collect();
    let mut out = Vec::new();
    for kind in kinds {
        let decl: Decl = match kind {
            GenKind::Signature => embed(&gen_signature(t, suffixes)?).into(),
            GenKind::Product => embed(&gen_product(t, suffixes)?).into(),
            GenKind::TermLang => gen_termlang(t, suffixes).into(),
            GenKind::OpenTermLang => gen_open_termlang(t, suffixes).into(),
            GenKind::Evaluator => return Err(GenError::EngineOnly),
            GenKind::Hom => gen_hom(t, &HomNaming::derive(t)).into(),
            GenKind::Monomorphism => {
                gen_monomorphism(t, &HomNaming::derive(t).with_func("mono", "mono-pres-")).into()
            }
            GenKind::Endomorphism => {
                gen_endomorphism(t, &HomNaming::derive(t).with_func("endo", "endo-pres-")).into()
            }
        };
        out.push(decl);
    }

    let mut seen: BTreeSet<Name> = global_names(&embed(t).into()).into_iter().collect();
    seen.insert(Name::new(PROD));
    seen.insert(Name::new("pair"));
    for d in &out {
        for n in global_names(d) {
            if !seen.insert(n.clone()) {
                return Err(GenError::NameClash(n));
            }
        }
    }
    Ok(out)
}

fn mentions_type(ty: &TypeExpr, head: &str) -> bool {
    match ty {
        TypeExpr::Set(_) | TypeExpr::Eq(..) => false,
        TypeExpr::Sort(n) => n == head,
        TypeExpr::App(h, args) => h == head || args.iter().any(|a| mentions_type(a, head)),
        TypeExpr::Arrow(d, c) => mentions_type(d, head) || mentions_type(c, head),
        TypeExpr::Pi(bs, body) => {
            bs.iter().any(|b| mentions_type(&b.ty, head)) || mentions_type(body, head)
        }
    }
}

/// The full output module: the `Prod` prelude when needed, the input theory,
/// then the generated declarations.
pub fn assemble_module(input: Decl, generated: Vec<Decl>) -> Vec<Decl> {
    let uses_prod = generated.iter().chain([&input]).any(|d| {
        d.params().iter().any(|b| mentions_type(&b.ty, PROD))
            || d.entries().iter().any(|c| mentions_type(&c.ty, PROD))
    });
    let mut module = Vec::with_capacity(generated.len() + 2);
    if uses_prod {
        module.push(prod_prelude());
    }
    module.push(input);
    module.extend(generated);
    module
}
