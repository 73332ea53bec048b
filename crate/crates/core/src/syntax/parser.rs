use std::fmt;

use super::lexer::{lex, Tok, Token};
use super::{Binder, Constr, DataDecl, Decl, Name, Pos, RecordDecl, Term, TypeExpr};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub pos: Pos,
    /// Descriptions of the tokens that would have been accepted.
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.pos)?;
        match self.expected.as_slice() {
            [] => write!(f, "{}", self.found),
            [one] => write!(f, "expected {one}, found {}", self.found),
            many => write!(
                f,
                "expected one of {}, found {}",
                many.join(", "),
                self.found
            ),
        }
    }
}

/// Parses a whole `.eqt` file.
pub fn parse_file(source: &str) -> Result<Vec<Decl>, ParseError> {
    let mut p = Parser::new(source)?;
    let decls = p.decls()?;
    p.expect_eof()?;
    Ok(decls)
}

/// Parses a standalone type expression.
pub fn parse_type(source: &str) -> Result<TypeExpr, ParseError> {
    let mut p = Parser::new(source)?;
    let ty = p.type_expr()?;
    p.expect_eof()?;
    Ok(ty)
}

/// Parses an applicative term. Names listed in `bound` become variables.
pub fn parse_term(source: &str, bound: &[Name]) -> Result<Term, ParseError> {
    let mut p = Parser::new(source)?;
    p.scope.extend(bound.iter().cloned());
    let atoms = p.app()?;
    let t = p.spine_to_term(atoms)?;
    p.expect_eof()?;
    Ok(t)
}

enum Atom {
    Name(Name),
    Set(Pos),
    Group(Box<Parsed>, Pos),
}

impl Atom {
    fn pos(&self) -> Pos {
        match self {
            Atom::Name(n) => n.pos,
            Atom::Set(p) | Atom::Group(_, p) => *p,
        }
    }
}

/// An expression before we know whether it denotes a type or a term.
enum Parsed {
    Spine(Vec<Atom>),
    Type(TypeExpr),
}

/// Recursive-descent parser over a token vector. Also drives the `.lib`
/// reader, which shares the lexer and embeds declarations and fields.
pub(crate) struct Parser {
    toks: Vec<Token>,
    i: usize,
    scope: Vec<Name>,
}

impl Parser {
    pub(crate) fn new(source: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(source)?,
            i: 0,
            scope: Vec::new(),
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    pub(crate) fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error(&[&tok.describe()]))
        }
    }

    pub(crate) fn expect_eof(&mut self) -> Result<(), ParseError> {
        self.expect(Tok::Eof).map(|_| ())
    }

    pub(crate) fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.bump().pos;
                Ok(Name::at(s, pos))
            }
            _ => Err(self.error(&["a name"])),
        }
    }

    /// Like [`Parser::ident`] but only accepts the given word.
    pub(crate) fn keyword(&mut self, word: &str) -> Result<Pos, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == word => Ok(self.bump().pos),
            _ => Err(self.error(&[&format!("`{word}`")])),
        }
    }

    pub(crate) fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    pub(crate) fn at_entry_start(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Colon
    }

    fn decls(&mut self) -> Result<Vec<Decl>, ParseError> {
        let mut decls = Vec::new();
        loop {
            match self.peek() {
                Tok::Record => decls.push(Decl::Record(self.record()?)),
                Tok::Data => decls.push(Decl::Data(self.data()?)),
                _ => return Ok(decls),
            }
        }
    }

    fn header(&mut self) -> Result<(Name, Vec<Binder>), ParseError> {
        let name = self.ident()?;
        let mut params = Vec::new();
        while matches!(self.peek(), Tok::LParen | Tok::LBrace) {
            params.push(self.binder()?);
        }
        self.expect(Tok::Colon)?;
        self.expect(Tok::Set)?;
        self.expect(Tok::Where)?;
        Ok((name, params))
    }

    pub(crate) fn record(&mut self) -> Result<RecordDecl, ParseError> {
        self.expect(Tok::Record)?;
        let (name, params) = self.header()?;
        let constructor = if *self.peek() == Tok::Constructor {
            self.bump();
            self.ident()?
        } else {
            name.suffixed("C")
        };
        let mut fields = Vec::new();
        if *self.peek() == Tok::Field {
            self.bump();
            fields = self.entries()?;
        } else if matches!(self.peek(), Tok::Ident(_)) {
            return Err(self.error(&["`field`"]));
        }
        Ok(RecordDecl {
            name,
            params,
            constructor,
            fields,
        })
    }

    fn data(&mut self) -> Result<DataDecl, ParseError> {
        self.expect(Tok::Data)?;
        let (name, params) = self.header()?;
        let constructors = self.entries()?;
        Ok(DataDecl {
            name,
            params,
            constructors,
        })
    }

    /// `NAME : typeExpr` repeated while the next two tokens look like an entry.
    pub(crate) fn entries(&mut self) -> Result<Vec<Constr>, ParseError> {
        let mut out = Vec::new();
        while self.at_entry_start() {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.type_expr()?;
            out.push(Constr { name, ty });
        }
        Ok(out)
    }

    fn at_binder_start(&self) -> bool {
        match self.peek() {
            Tok::LBrace => true,
            Tok::LParen => {
                let mut k = 1;
                while matches!(self.peek_at(k), Tok::Ident(_)) {
                    k += 1;
                }
                k > 1 && *self.peek_at(k) == Tok::Colon
            }
            _ => false,
        }
    }

    fn binder(&mut self) -> Result<Binder, ParseError> {
        let (hidden, close) = match self.peek() {
            Tok::LBrace => (true, Tok::RBrace),
            Tok::LParen => (false, Tok::RParen),
            _ => return Err(self.error(&["`(`", "`{`"])),
        };
        self.bump();
        let mut names: Vec<Name> = vec![self.ident()?];
        while matches!(self.peek(), Tok::Ident(_)) {
            let n = self.ident()?;
            if names.contains(&n) {
                return Err(ParseError {
                    pos: n.pos,
                    expected: vec![],
                    found: format!("name `{n}` bound twice in one binder"),
                });
            }
            names.push(n);
        }
        self.expect(Tok::Colon)?;
        let ty = self.type_expr()?;
        self.expect(close)?;
        Ok(Binder { names, ty, hidden })
    }

    pub(crate) fn type_expr(&mut self) -> Result<TypeExpr, ParseError> {
        let parsed = self.expr()?;
        self.to_type(parsed)
    }

    fn expr(&mut self) -> Result<Parsed, ParseError> {
        if self.at_binder_start() {
            let mut binders = Vec::new();
            while self.at_binder_start() {
                binders.push(self.binder()?);
            }
            self.expect(Tok::Arrow)?;
            let depth = self.scope.len();
            self.scope
                .extend(binders.iter().flat_map(|b| b.names.iter().cloned()));
            let body = self.type_expr();
            self.scope.truncate(depth);
            return Ok(Parsed::Type(TypeExpr::Pi(binders, Box::new(body?))));
        }
        let operand = self.operand()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let dom = self.to_type(operand)?;
            let cod = self.type_expr()?;
            return Ok(Parsed::Type(TypeExpr::arrow(dom, cod)));
        }
        Ok(operand)
    }

    fn operand(&mut self) -> Result<Parsed, ParseError> {
        let lhs = self.app()?;
        if *self.peek() != Tok::EqEq {
            return Ok(Parsed::Spine(lhs));
        }
        self.bump();
        let rhs = self.app()?;
        let lhs = self.spine_to_term(lhs)?;
        let rhs = self.spine_to_term(rhs)?;
        if *self.peek() == Tok::EqEq {
            return Err(self.error(&["`→`", "end of equation"]));
        }
        Ok(Parsed::Type(TypeExpr::Eq(lhs, rhs)))
    }

    fn at_atom_start(&self) -> bool {
        match self.peek() {
            Tok::Ident(_) => *self.peek_at(1) != Tok::Colon,
            Tok::Set => true,
            Tok::LParen => !self.at_binder_start(),
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Vec<Atom>, ParseError> {
        let mut atoms = Vec::new();
        while self.at_atom_start() {
            atoms.push(self.atom()?);
        }
        if atoms.is_empty() {
            return Err(self.error(&["a type or term"]));
        }
        Ok(atoms)
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        match self.peek() {
            Tok::Ident(_) => Ok(Atom::Name(self.ident()?)),
            Tok::Set => Ok(Atom::Set(self.bump().pos)),
            Tok::LParen => {
                let pos = self.bump().pos;
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Atom::Group(Box::new(inner), pos))
            }
            _ => Err(self.error(&["a name", "`Set`", "`(`"])),
        }
    }

    fn to_type(&self, parsed: Parsed) -> Result<TypeExpr, ParseError> {
        match parsed {
            Parsed::Type(t) => Ok(t),
            Parsed::Spine(atoms) => self.spine_to_type(atoms),
        }
    }

    fn spine_to_type(&self, atoms: Vec<Atom>) -> Result<TypeExpr, ParseError> {
        let mut it = atoms.into_iter();
        let head = it.next().expect("spines are nonempty");
        let args: Vec<Atom> = it.collect();
        match head {
            Atom::Name(n) => {
                let args = args
                    .into_iter()
                    .map(|a| self.atom_to_type(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(TypeExpr::app(n, args))
            }
            Atom::Set(pos) if args.is_empty() => Ok(TypeExpr::Set(pos)),
            Atom::Group(g, _) if args.is_empty() => self.to_type(*g),
            other => Err(ParseError {
                pos: other.pos(),
                expected: vec![],
                found: "only named types can be applied".into(),
            }),
        }
    }

    fn atom_to_type(&self, atom: Atom) -> Result<TypeExpr, ParseError> {
        match atom {
            Atom::Name(n) => Ok(TypeExpr::Sort(n)),
            Atom::Set(pos) => Ok(TypeExpr::Set(pos)),
            Atom::Group(g, _) => self.to_type(*g),
        }
    }

    fn spine_to_term(&self, atoms: Vec<Atom>) -> Result<Term, ParseError> {
        let mut it = atoms.into_iter();
        let head = self.atom_to_term(it.next().expect("spines are nonempty"))?;
        it.try_fold(head, |f, a| {
            Ok(Term::App(Box::new(f), Box::new(self.atom_to_term(a)?)))
        })
    }

    fn atom_to_term(&self, atom: Atom) -> Result<Term, ParseError> {
        match atom {
            Atom::Name(n) => Ok(if self.scope.contains(&n) {
                Term::Var(n)
            } else {
                Term::Sym(n)
            }),
            Atom::Group(g, pos) => match *g {
                Parsed::Spine(inner) => self.spine_to_term(inner),
                Parsed::Type(_) => Err(ParseError {
                    pos,
                    expected: vec!["a term".into()],
                    found: "a type".into(),
                }),
            },
            Atom::Set(pos) => Err(ParseError {
                pos,
                expected: vec!["a term".into()],
                found: "`Set`".into(),
            }),
        }
    }
}
