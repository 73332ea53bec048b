use std::fmt::Write;

use super::{Binder, Decl, Term, TypeExpr};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    ArrowDom,
    AppArg,
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    term(t, &mut out, false);
    out
}

fn term(t: &Term, out: &mut String, as_arg: bool) {
    match t {
        Term::Var(n) | Term::Sym(n) => out.push_str(n.as_str()),
        Term::App(f, a) => {
            if as_arg {
                out.push('(');
            }
            term(f, out, false);
            out.push(' ');
            term(a, out, true);
            if as_arg {
                out.push(')');
            }
        }
    }
}

pub fn print_type(t: &TypeExpr) -> String {
    let mut out = String::new();
    ty(t, &mut out, Ctx::Top);
    out
}

fn ty(t: &TypeExpr, out: &mut String, ctx: Ctx) {
    let wrap = match t {
        TypeExpr::Set(_) | TypeExpr::Sort(_) => false,
        TypeExpr::App(..) | TypeExpr::Eq(..) => ctx == Ctx::AppArg,
        TypeExpr::Arrow(..) | TypeExpr::Pi(..) => ctx != Ctx::Top,
    };
    if wrap {
        out.push('(');
    }
    match t {
        TypeExpr::Set(_) => out.push_str("Set"),
        TypeExpr::Sort(n) => out.push_str(n.as_str()),
        TypeExpr::App(h, args) => {
            out.push_str(h.as_str());
            for a in args {
                out.push(' ');
                ty(a, out, Ctx::AppArg);
            }
        }
        TypeExpr::Arrow(d, c) => {
            ty(d, out, Ctx::ArrowDom);
            out.push_str(" → ");
            ty(c, out, Ctx::Top);
        }
        TypeExpr::Pi(bs, body) => {
            binders(bs, out);
            out.push_str(" → ");
            ty(body, out, Ctx::Top);
        }
        TypeExpr::Eq(l, r) => {
            term(l, out, false);
            out.push_str(" == ");
            term(r, out, false);
        }
    }
    if wrap {
        out.push(')');
    }
}

fn binders(bs: &[Binder], out: &mut String) {
    for (i, b) in bs.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let (open, close) = if b.hidden { ('{', '}') } else { ('(', ')') };
        out.push(open);
        for n in &b.names {
            out.push_str(n.as_str());
            out.push(' ');
        }
        out.push_str(": ");
        ty(&b.ty, out, Ctx::Top);
        out.push(close);
    }
}

/// Renders one declaration, ending with a newline.
pub fn print_decl(d: &Decl) -> String {
    let mut out = String::new();
    let (kw, name, params) = match d {
        Decl::Record(r) => ("record", &r.name, &r.params),
        Decl::Data(dd) => ("data", &dd.name, &dd.params),
    };
    write!(out, "{kw} {name}").unwrap();
    if !params.is_empty() {
        out.push(' ');
        binders(params, &mut out);
    }
    out.push_str(" : Set where\n");
    match d {
        Decl::Record(r) => {
            writeln!(out, "  constructor {}", r.constructor).unwrap();
            if !r.fields.is_empty() {
                out.push_str("  field\n");
            }
            for f in &r.fields {
                writeln!(out, "    {} : {}", f.name, print_type(&f.ty)).unwrap();
            }
        }
        Decl::Data(dd) => {
            for c in &dd.constructors {
                writeln!(out, "  {} : {}", c.name, print_type(&c.ty)).unwrap();
            }
        }
    }
    out
}

/// Renders declarations separated by blank lines.
pub fn print_module(decls: &[Decl]) -> String {
    decls.iter().map(print_decl).collect::<Vec<_>>().join("\n")
}
