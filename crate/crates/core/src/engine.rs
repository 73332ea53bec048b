//! Open terms over a theory, evaluation into a model, and simplification by
//! rewriting with oriented axioms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::eqtheory::{associativity_of, Axiom, EqTheory};
use crate::syntax::{Name, Term};

/// A term in a context of `n` variables, numbered from zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpenTerm {
    Var(usize),
    Op(Name, Vec<OpenTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unknown function symbol `{0}`")]
    UnknownSymbol(Name),
    #[error("`{op}` takes {expected} argument(s), given {found}")]
    Arity {
        op: Name,
        expected: usize,
        found: usize,
    },
    #[error("variable `{0}` applied to arguments")]
    VarApplied(Name),
    #[error(transparent)]
    Parse(#[from] crate::syntax::ParseError),
}

impl OpenTerm {
    pub fn op(name: &str, args: impl IntoIterator<Item = OpenTerm>) -> OpenTerm {
        OpenTerm::Op(Name::new(name), args.into_iter().collect())
    }

    /// Node count: symbols plus variable occurrences.
    pub fn size(&self) -> usize {
        match self {
            OpenTerm::Var(_) => 1,
            OpenTerm::Op(_, args) => 1 + args.iter().map(OpenTerm::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            OpenTerm::Var(_) => 1,
            OpenTerm::Op(_, args) => 1 + args.iter().map(OpenTerm::depth).max().unwrap_or(0),
        }
    }

    /// Occurrence count of every variable.
    pub fn var_counts(&self) -> BTreeMap<usize, usize> {
        fn go(t: &OpenTerm, acc: &mut BTreeMap<usize, usize>) {
            match t {
                OpenTerm::Var(i) => *acc.entry(*i).or_default() += 1,
                OpenTerm::Op(_, args) => args.iter().for_each(|a| go(a, acc)),
            }
        }
        let mut acc = BTreeMap::new();
        go(self, &mut acc);
        acc
    }

    /// Converts a surface term. `var_of` resolves a leaf name to a variable
    /// index; any other leaf is a function symbol.
    pub fn from_term(
        t: &Term,
        var_of: &impl Fn(&Name) -> Option<usize>,
    ) -> Result<Self, TermError> {
        let (head, args) = t.spine();
        let name = t.head_name();
        let var = match head {
            Term::Var(n) | Term::Sym(n) => var_of(n),
            Term::App(..) => unreachable!(),
        };
        match var {
            Some(i) if args.is_empty() => Ok(OpenTerm::Var(i)),
            Some(_) => Err(TermError::VarApplied(name.clone())),
            None => Ok(OpenTerm::Op(
                name.clone(),
                args.into_iter()
                    .map(|a| OpenTerm::from_term(a, var_of))
                    .collect::<Result<_, _>>()?,
            )),
        }
    }

    /// Parses `src` as a term over `theory`. Names that are not function
    /// symbols become variables, numbered by first occurrence.
    pub fn parse_in(theory: &EqTheory, src: &str) -> Result<(Self, Vec<Name>), TermError> {
        let term = crate::syntax::parse_term(src, &[])?;
        let mut vars: Vec<Name> = Vec::new();
        term.for_each_leaf(&mut |leaf| {
            let (Term::Var(n) | Term::Sym(n)) = leaf else {
                return;
            };
            if theory.func(n).is_none() && !vars.contains(n) {
                vars.push(n.clone());
            }
        });
        let t = OpenTerm::from_term(&term, &|n| vars.iter().position(|v| v == n))?;
        t.check_arity(theory)?;
        Ok((t, vars))
    }

    pub fn check_arity(&self, theory: &EqTheory) -> Result<(), TermError> {
        match self {
            OpenTerm::Var(_) => Ok(()),
            OpenTerm::Op(f, args) => {
                let expected = theory
                    .arity(f)
                    .ok_or_else(|| TermError::UnknownSymbol(f.clone()))?;
                if expected != args.len() {
                    return Err(TermError::Arity {
                        op: f.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check_arity(theory))
            }
        }
    }

    pub fn to_term(&self, var_names: &[Name]) -> Term {
        match self {
            OpenTerm::Var(i) => Term::Var(
                var_names
                    .get(*i)
                    .cloned()
                    .unwrap_or_else(|| Name::new(format!("v{i}"))),
            ),
            OpenTerm::Op(f, args) => Term::apply(
                Term::Sym(f.clone()),
                args.iter().map(|a| a.to_term(var_names)),
            ),
        }
    }

    fn subst(&self, sigma: &[Option<OpenTerm>]) -> OpenTerm {
        match self {
            OpenTerm::Var(i) => sigma[*i].clone().expect("rhs variables occur in lhs"),
            OpenTerm::Op(f, args) => {
                OpenTerm::Op(f.clone(), args.iter().map(|a| a.subst(sigma)).collect())
            }
        }
    }
}

impl fmt::Display for OpenTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpenTerm::Var(i) => write!(f, "#{i}"),
            OpenTerm::Op(op, args) if args.is_empty() => write!(f, "{op}"),
            OpenTerm::Op(op, args) => {
                write!(f, "({op}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub type Interp<V> = Arc<dyn Fn(&[V]) -> V + Send + Sync>;

/// A carrier `V` with an interpretation of each function symbol.
pub struct Model<V> {
    ops: BTreeMap<Name, (usize, Interp<V>)>,
}

impl<V> Clone for Model<V> {
    fn clone(&self) -> Self {
        Model {
            ops: self.ops.clone(),
        }
    }
}

impl<V> Default for Model<V> {
    fn default() -> Self {
        Model {
            ops: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("model does not interpret `{0}`")]
    UnknownOp(Name),
    #[error("`{op}` interpreted with arity {expected}, applied to {found}")]
    Arity {
        op: Name,
        expected: usize,
        found: usize,
    },
    #[error("variable #{index} outside an environment of {len}")]
    UnboundVar { index: usize, len: usize },
}

impl<V: Clone> Model<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_op(
        mut self,
        name: &str,
        arity: usize,
        f: impl Fn(&[V]) -> V + Send + Sync + 'static,
    ) -> Self {
        self.ops.insert(Name::new(name), (arity, Arc::new(f)));
        self
    }

    /// Checks that every function symbol of `t` is interpreted at its arity.
    pub fn covers(&self, t: &EqTheory) -> Result<(), EvalError> {
        for f in &t.func_types {
            let expected = crate::eqtheory::arity_of(&f.ty);
            match self.ops.get(&f.name) {
                None => return Err(EvalError::UnknownOp(f.name.clone())),
                Some((found, _)) if *found != expected => {
                    return Err(EvalError::Arity {
                        op: f.name.clone(),
                        expected: *found,
                        found: expected,
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

/// The homomorphic extension of `env` through the model's interpretation.
pub fn eval<V: Clone>(t: &OpenTerm, m: &Model<V>, env: &[V]) -> Result<V, EvalError> {
    match t {
        OpenTerm::Var(i) => env.get(*i).cloned().ok_or(EvalError::UnboundVar {
            index: *i,
            len: env.len(),
        }),
        OpenTerm::Op(f, args) => {
            let (arity, interp) = m
                .ops
                .get(f)
                .ok_or_else(|| EvalError::UnknownOp(f.clone()))?;
            if *arity != args.len() {
                return Err(EvalError::Arity {
                    op: f.clone(),
                    expected: *arity,
                    found: args.len(),
                });
            }
            let vals = args
                .iter()
                .map(|a| eval(a, m, env))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(interp(&vals))
        }
    }
}

/// `lhs ⇒ rhs` over `vars` pattern variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub vars: usize,
    pub lhs: OpenTerm,
    pub rhs: OpenTerm,
    pub source: Name,
}

fn axiom_sides(ax: &Axiom) -> Result<(usize, OpenTerm, OpenTerm), TermError> {
    let vars: Vec<Name> = ax.vars().into_iter().map(|(n, _)| n).collect();
    let var_of = |n: &Name| vars.iter().position(|v| v == n);
    Ok((
        vars.len(),
        OpenTerm::from_term(&ax.lhs, &var_of)?,
        OpenTerm::from_term(&ax.rhs, &var_of)?,
    ))
}

/// The rhs uses no variable absent from the lhs, nor more often than the lhs.
fn decreasing(lhs: &OpenTerm, rhs: &OpenTerm) -> bool {
    if matches!(lhs, OpenTerm::Var(_)) || rhs.size() >= lhs.size() {
        return false;
    }
    let have = lhs.var_counts();
    rhs.var_counts()
        .iter()
        .all(|(v, n)| have.get(v).is_some_and(|m| m >= n))
}

/// Orients `ax` in whichever direction strictly shrinks terms, trying the
/// written direction first. `None` when neither does.
pub fn orient(ax: &Axiom) -> Option<RewriteRule> {
    let (vars, l, r) = axiom_sides(ax).ok()?;
    let rule = |lhs: OpenTerm, rhs: OpenTerm| RewriteRule {
        vars,
        lhs,
        rhs,
        source: ax.name.clone(),
    };
    if decreasing(&l, &r) {
        Some(rule(l, r))
    } else if decreasing(&r, &l) {
        Some(rule(r, l))
    } else {
        None
    }
}

/// For an associativity axiom, the rule that nests to the right:
/// `op (op x y) z ⇒ op x (op y z)`.
pub fn orient_assoc(ax: &Axiom) -> Option<RewriteRule> {
    associativity_of(ax)?;
    let (vars, l, r) = axiom_sides(ax).ok()?;
    let left_nested =
        |t: &OpenTerm| matches!(t, OpenTerm::Op(_, a) if matches!(a[0], OpenTerm::Op(..)));
    let (lhs, rhs) = if left_nested(&l) { (l, r) } else { (r, l) };
    Some(RewriteRule {
        vars,
        lhs,
        rhs,
        source: ax.name.clone(),
    })
}

/// Rules for every orientable axiom of `t`, in declaration order.
pub fn rules_for(t: &EqTheory, force_assoc: bool) -> Vec<RewriteRule> {
    t.axioms
        .iter()
        .filter_map(|ax| orient(ax).or_else(|| if force_assoc { orient_assoc(ax) } else { None }))
        .collect()
}

/// Fuel that always suffices: size-decreasing rules need fewer steps than
/// the term has nodes; a forced associativity rule is size-preserving and
/// needs up to quadratically many.
pub fn suggested_fuel(t: &OpenTerm, rules: &[RewriteRule]) -> usize {
    let n = t.size();
    if rules.iter().all(|r| r.rhs.size() < r.lhs.size()) {
        n.max(1)
    } else {
        (n * n).max(1)
    }
}

fn matches(pat: &OpenTerm, t: &OpenTerm, sigma: &mut [Option<OpenTerm>]) -> bool {
    match (pat, t) {
        (OpenTerm::Var(i), _) => match &sigma[*i] {
            Some(bound) => bound == t,
            None => {
                sigma[*i] = Some(t.clone());
                true
            }
        },
        (OpenTerm::Op(f, ps), OpenTerm::Op(g, ts)) => {
            f == g && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| matches(p, t, sigma))
        }
        (OpenTerm::Op(..), OpenTerm::Var(_)) => false,
    }
}

fn rewrite_root(t: &OpenTerm, rules: &[RewriteRule]) -> Option<OpenTerm> {
    rules.iter().find_map(|r| {
        let mut sigma = vec![None; r.vars];
        matches(&r.lhs, t, &mut sigma).then(|| r.rhs.subst(&sigma))
    })
}

/// Result of a normalization run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub term: OpenTerm,
    pub steps: usize,
    pub out_of_fuel: bool,
}

/// Innermost, leftmost rewriting with the first matching rule, for at most
/// `fuel` steps.
pub fn normalize_traced(t: &OpenTerm, rules: &[RewriteRule], fuel: usize) -> Normalized {
    struct Run<'a> {
        rules: &'a [RewriteRule],
        fuel: usize,
        steps: usize,
    }
    impl Run<'_> {
        fn norm(&mut self, t: &OpenTerm) -> OpenTerm {
            let t = match t {
                OpenTerm::Var(_) => return t.clone(),
                OpenTerm::Op(f, args) => {
                    OpenTerm::Op(f.clone(), args.iter().map(|a| self.norm(a)).collect())
                }
            };
            if self.steps == self.fuel {
                return t;
            }
            match rewrite_root(&t, self.rules) {
                Some(next) => {
                    self.steps += 1;
                    self.norm(&next)
                }
                None => t,
            }
        }
    }
    let mut run = Run {
        rules,
        fuel,
        steps: 0,
    };
    let term = run.norm(t);
    let out_of_fuel = run.steps == fuel && has_redex(&term, rules);
    Normalized {
        term,
        steps: run.steps,
        out_of_fuel,
    }
}

pub fn normalize(t: &OpenTerm, rules: &[RewriteRule], fuel: usize) -> OpenTerm {
    normalize_traced(t, rules, fuel).term
}

pub fn has_redex(t: &OpenTerm, rules: &[RewriteRule]) -> bool {
    rewrite_root(t, rules).is_some()
        || matches!(t, OpenTerm::Op(_, args) if args.iter().any(|a| has_redex(a, rules)))
}

fn signature(t: &EqTheory) -> Vec<(Name, usize)> {
    t.func_types
        .iter()
        .map(|f| (f.name.clone(), crate::eqtheory::arity_of(&f.ty)))
        .collect()
}

/// Every term over `t` in `nvars` variables up to `depth`, without
/// duplicates, ordered by size (ties in generation order).
pub fn enumerate_terms(t: &EqTheory, nvars: usize, depth: usize) -> Vec<OpenTerm> {
    let sig = signature(t);
    // exact[d] holds the terms of depth exactly d + 1
    let mut exact: Vec<Vec<OpenTerm>> = Vec::new();
    let mut upto: Vec<OpenTerm> = Vec::new();
    for d in 0..depth {
        let mut level = Vec::new();
        if d == 0 {
            level.extend((0..nvars).map(OpenTerm::Var));
            level.extend(
                sig.iter()
                    .filter(|(_, n)| *n == 0)
                    .map(|(f, _)| OpenTerm::Op(f.clone(), vec![])),
            );
        } else {
            let prev_start = upto.len() - exact[d - 1].len();
            for (f, n) in sig.iter().filter(|(_, n)| *n > 0) {
                // argument tuples from `upto` with at least one of depth d
                let mut idx = vec![0usize; *n];
                loop {
                    if idx.iter().any(|&i| i >= prev_start) {
                        level.push(OpenTerm::Op(
                            f.clone(),
                            idx.iter().map(|&i| upto[i].clone()).collect(),
                        ));
                    }
                    let mut k = *n;
                    loop {
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < upto.len() {
                            break;
                        }
                        idx[k] = 0;
                        if k == 0 {
                            k = usize::MAX;
                            break;
                        }
                    }
                    if k == usize::MAX {
                        break;
                    }
                }
            }
        }
        upto.extend(level.iter().cloned());
        exact.push(level);
    }
    upto.sort_by_key(OpenTerm::size);
    upto
}

/// Draws a term of depth at most `max_depth`. `pick(n)` must return an
/// index below `n`.
pub fn sample_term(
    t: &EqTheory,
    nvars: usize,
    max_depth: usize,
    pick: &mut impl FnMut(usize) -> usize,
) -> OpenTerm {
    let sig = signature(t);
    let leaves: Vec<OpenTerm> = (0..nvars)
        .map(OpenTerm::Var)
        .chain(
            sig.iter()
                .filter(|(_, n)| *n == 0)
                .map(|(f, _)| OpenTerm::Op(f.clone(), vec![])),
        )
        .collect();
    let nodes: Vec<&(Name, usize)> = sig.iter().filter(|(_, n)| *n > 0).collect();
    fn go(
        depth: usize,
        leaves: &[OpenTerm],
        nodes: &[&(Name, usize)],
        pick: &mut impl FnMut(usize) -> usize,
    ) -> OpenTerm {
        let choices = if depth <= 1 { 0 } else { nodes.len() };
        assert!(
            !leaves.is_empty() || choices > 0,
            "theory has no closed terms"
        );
        let k = pick(leaves.len() + choices);
        if k < leaves.len() {
            return leaves[k].clone();
        }
        let (f, n) = nodes[k - leaves.len()];
        OpenTerm::Op(
            f.clone(),
            (0..*n)
                .map(|_| go(depth - 1, leaves, nodes, pick))
                .collect(),
        )
    }
    go(max_depth.max(1), &leaves, &nodes, pick)
}
