//! Surface syntax for theory presentations: the AST, a hand-written lexer and
//! recursive-descent parser, and a deterministic pretty printer.
//!
//! Source positions live on [`Name`]s (and on `Set`), which are the leaves of
//! every tree. [`Pos`] never takes part in equality or hashing, so two trees
//! that differ only in where they came from compare equal.

mod lexer;
mod parser;
mod printer;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub(crate) use parser::Parser;
pub use parser::{parse_file, parse_term, parse_type, ParseError};
pub use printer::{print_decl, print_module, print_term, print_type};

pub(crate) use lexer::Tok;

/// Line and column (both 1-based) of a token. `0:0` marks synthesized nodes.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }

    pub fn is_synthetic(&self) -> bool {
        self.line == 0
    }
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

impl Hash for Pos {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

pub const RESERVED: &[&str] = &["record", "data", "field", "where", "constructor", "Set"];

/// An identifier. Equality, ordering and hashing look at the text only.
#[derive(Clone, Debug)]
pub struct Name {
    text: Arc<str>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NameError {
    #[error("empty name")]
    Empty,
    #[error("`{0}` is a reserved word")]
    Reserved(String),
    #[error("`{0}` is not a valid name")]
    Invalid(String),
}

pub(crate) fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub(crate) fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '-'
}

impl Name {
    /// Builds a name from text known to be valid (generated names, literals).
    pub fn new(text: impl AsRef<str>) -> Self {
        let text = text.as_ref();
        debug_assert!(Name::validate(text).is_ok(), "invalid name {text:?}");
        Name {
            text: Arc::from(text),
            pos: Pos::default(),
        }
    }

    pub fn try_new(text: impl AsRef<str>) -> Result<Self, NameError> {
        let text = text.as_ref();
        Name::validate(text)?;
        Ok(Name::new(text))
    }

    pub fn at(text: impl AsRef<str>, pos: Pos) -> Self {
        Name {
            pos,
            ..Name::new(text)
        }
    }

    fn validate(text: &str) -> Result<(), NameError> {
        let mut chars = text.chars();
        let first = chars.next().ok_or(NameError::Empty)?;
        if !is_name_start(first)
            || !chars.all(is_name_char)
            || text.contains("--")
            || text.contains("->")
        {
            return Err(NameError::Invalid(text.to_string()));
        }
        if RESERVED.contains(&text) {
            return Err(NameError::Reserved(text.to_string()));
        }
        Ok(())
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// `self` with `suffix` appended, keeping the position.
    pub fn suffixed(&self, suffix: &str) -> Name {
        Name::at(format!("{}{}", self.text, suffix), self.pos)
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for Name {}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.text.hash(state)
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> Ordering {
        self.text.cmp(&other.text)
    }
}

impl PartialEq<str> for Name {
    fn eq(&self, other: &str) -> bool {
        &*self.text == other
    }
}

impl PartialEq<&str> for Name {
    fn eq(&self, other: &&str) -> bool {
        &*self.text == *other
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// First-order applicative terms. Variables are names bound by an enclosing
/// quantifier; everything else is a symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    Sym(Name),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl AsRef<str>) -> Term {
        Term::Var(Name::new(name))
    }

    pub fn sym(name: impl AsRef<str>) -> Term {
        Term::Sym(Name::new(name))
    }

    /// Left-nested application of `head` to `args`.
    pub fn apply(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter()
            .fold(head, |f, a| Term::App(Box::new(f), Box::new(a)))
    }

    /// Flattens to head plus argument list.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Term::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// The name at the head of the spine.
    pub fn head_name(&self) -> &Name {
        match self.spine().0 {
            Term::Var(n) | Term::Sym(n) => n,
            Term::App(..) => unreachable!("spine head is never an application"),
        }
    }

    pub fn pos(&self) -> Pos {
        self.head_name().pos
    }

    /// Number of symbol and variable occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Sym(_) => 1,
            Term::App(f, a) => f.size() + a.size(),
        }
    }

    /// Rewrites every leaf name through `f`.
    pub fn map_names(&self, f: &mut impl FnMut(&Term) -> Term) -> Term {
        match self {
            Term::App(g, a) => Term::App(Box::new(g.map_names(f)), Box::new(a.map_names(f))),
            leaf => f(leaf),
        }
    }

    /// Visits leaves left to right.
    pub fn for_each_leaf<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        match self {
            Term::App(g, a) => {
                g.for_each_leaf(f);
                a.for_each_leaf(f);
            }
            leaf => f(leaf),
        }
    }
}

/// A group of names sharing one type, e.g. `(x y : A)` or `{x : A}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub names: Vec<Name>,
    pub ty: TypeExpr,
    pub hidden: bool,
}

impl Binder {
    pub fn explicit(name: Name, ty: TypeExpr) -> Self {
        Binder {
            names: vec![name],
            ty,
            hidden: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    /// The universe `Set`.
    Set(Pos),
    Sort(Name),
    App(Name, Vec<TypeExpr>),
    Arrow(Box<TypeExpr>, Box<TypeExpr>),
    Pi(Vec<Binder>, Box<TypeExpr>),
    Eq(Term, Term),
}

impl TypeExpr {
    pub fn set() -> TypeExpr {
        TypeExpr::Set(Pos::default())
    }

    pub fn sort(name: impl AsRef<str>) -> TypeExpr {
        TypeExpr::Sort(Name::new(name))
    }

    pub fn arrow(dom: TypeExpr, cod: TypeExpr) -> TypeExpr {
        TypeExpr::Arrow(Box::new(dom), Box::new(cod))
    }

    /// Right-nested arrow chain `doms[0] → … → cod`.
    pub fn arrows(doms: impl IntoIterator<Item = TypeExpr>, cod: TypeExpr) -> TypeExpr {
        let doms: Vec<_> = doms.into_iter().collect();
        doms.into_iter()
            .rev()
            .fold(cod, |acc, d| TypeExpr::arrow(d, acc))
    }

    /// Type application; collapses to a bare sort when there are no arguments.
    pub fn app(head: Name, args: Vec<TypeExpr>) -> TypeExpr {
        if args.is_empty() {
            TypeExpr::Sort(head)
        } else {
            TypeExpr::App(head, args)
        }
    }

    pub fn pi(binders: Vec<Binder>, body: TypeExpr) -> TypeExpr {
        if binders.is_empty() {
            body
        } else {
            TypeExpr::Pi(binders, Box::new(body))
        }
    }

    pub fn is_set(&self) -> bool {
        matches!(self, TypeExpr::Set(_))
    }

    /// Splits an arrow chain into its domains and final codomain.
    pub fn uncurry(&self) -> (Vec<&TypeExpr>, &TypeExpr) {
        let mut doms = Vec::new();
        let mut ty = self;
        while let TypeExpr::Arrow(d, c) = ty {
            doms.push(&**d);
            ty = c;
        }
        (doms, ty)
    }

    pub fn pos(&self) -> Pos {
        match self {
            TypeExpr::Set(p) => *p,
            TypeExpr::Sort(n) | TypeExpr::App(n, _) => n.pos,
            TypeExpr::Arrow(d, _) => d.pos(),
            TypeExpr::Pi(bs, body) => bs
                .first()
                .and_then(|b| b.names.first())
                .map(|n| n.pos)
                .unwrap_or_else(|| body.pos()),
            TypeExpr::Eq(l, _) => l.pos(),
        }
    }
}

/// A named declaration inside a record or data type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constr {
    pub name: Name,
    pub ty: TypeExpr,
}

impl Constr {
    pub fn new(name: Name, ty: TypeExpr) -> Self {
        Constr { name, ty }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RecordDecl {
    pub name: Name,
    pub params: Vec<Binder>,
    pub constructor: Name,
    pub fields: Vec<Constr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DataDecl {
    pub name: Name,
    pub params: Vec<Binder>,
    pub constructors: Vec<Constr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Decl {
    Record(RecordDecl),
    Data(DataDecl),
}

impl Decl {
    pub fn name(&self) -> &Name {
        match self {
            Decl::Record(r) => &r.name,
            Decl::Data(d) => &d.name,
        }
    }

    pub fn params(&self) -> &[Binder] {
        match self {
            Decl::Record(r) => &r.params,
            Decl::Data(d) => &d.params,
        }
    }

    /// Fields of a record or constructors of a data type.
    pub fn entries(&self) -> &[Constr] {
        match self {
            Decl::Record(r) => &r.fields,
            Decl::Data(d) => &d.constructors,
        }
    }

    pub fn as_record(&self) -> Option<&RecordDecl> {
        match self {
            Decl::Record(r) => Some(r),
            Decl::Data(_) => None,
        }
    }

    pub fn as_data(&self) -> Option<&DataDecl> {
        match self {
            Decl::Data(d) => Some(d),
            Decl::Record(_) => None,
        }
    }
}

impl From<RecordDecl> for Decl {
    fn from(r: RecordDecl) -> Self {
        Decl::Record(r)
    }
}

impl From<DataDecl> for Decl {
    fn from(d: DataDecl) -> Self {
        Decl::Data(d)
    }
}
