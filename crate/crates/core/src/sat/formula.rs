use std::collections::BTreeSet;
use std::fmt;

use crate::ast::{Atom, AtomTable};

/// The atom a level variable tracks: a program atom or the fresh `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LevelAtom {
    Atom(Atom),
    T,
}

/// Propositional variables of the answer-set encoding.
///
/// The derived order is the DIMACS numbering order: base atoms by id, then
/// `t`, then level variables ordered by `(m, level, atom)` with `t` last
/// among the atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Base(Atom),
    T0,
    /// `atom^level_m`: whether `atom` survives elimination level `level`
    /// while testing minimality at `m`.
    Level { m: Atom, level: usize, atom: LevelAtom },
}

impl Var {
    pub fn level(m: Atom, level: usize, atom: LevelAtom) -> Self {
        Var::Level { m, level, atom }
    }

    pub fn display<'a>(&'a self, table: &'a AtomTable) -> VarDisplay<'a> {
        VarDisplay { var: self, table }
    }
}

pub struct VarDisplay<'a> {
    var: &'a Var,
    table: &'a AtomTable,
}

impl fmt::Display for VarDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.table;
        match *self.var {
            Var::Base(a) => write!(f, "{}", t.name(a)),
            Var::T0 => write!(f, "__t"),
            Var::Level { m, level, atom } => {
                let a = match atom {
                    LevelAtom::Atom(a) => t.name(a),
                    LevelAtom::T => "__t",
                };
                write!(f, "{a}^{level}_{}", t.name(m))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    Var(Var),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

// The constructors below fold constants: an empty conjunction is `true`, an
// empty disjunction is `false`, and singleton connectives collapse.
impl Formula {
    pub fn var(v: Var) -> Self {
        Formula::Var(v)
    }

    pub fn base(a: Atom) -> Self {
        Formula::Var(Var::Base(a))
    }

    pub fn not(f: Formula) -> Self {
        match f {
            Formula::Const(b) => Formula::Const(!b),
            Formula::Not(inner) => *inner,
            f => Formula::Not(Box::new(f)),
        }
    }

    pub fn and(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut kept = Vec::new();
        for f in items {
            match f {
                Formula::Const(true) => {}
                Formula::Const(false) => return Formula::Const(false),
                f => kept.push(f),
            }
        }
        match kept.len() {
            0 => Formula::Const(true),
            1 => kept.pop().unwrap(),
            _ => Formula::And(kept),
        }
    }

    pub fn or(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut kept = Vec::new();
        for f in items {
            match f {
                Formula::Const(false) => {}
                Formula::Const(true) => return Formula::Const(true),
                f => kept.push(f),
            }
        }
        match kept.len() {
            0 => Formula::Const(false),
            1 => kept.pop().unwrap(),
            _ => Formula::Or(kept),
        }
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        match (lhs, rhs) {
            (Formula::Const(false), _) | (_, Formula::Const(true)) => Formula::Const(true),
            (Formula::Const(true), r) => r,
            (l, Formula::Const(false)) => Formula::not(l),
            (l, r) => Formula::Implies(Box::new(l), Box::new(r)),
        }
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        match (lhs, rhs) {
            (Formula::Const(a), Formula::Const(b)) => Formula::Const(a == b),
            (Formula::Const(true), f) | (f, Formula::Const(true)) => f,
            (Formula::Const(false), f) | (f, Formula::Const(false)) => Formula::not(f),
            (l, r) => Formula::Iff(Box::new(l), Box::new(r)),
        }
    }

    /// Number of nodes in the formula tree.
    pub fn node_count(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Var(_) => 1,
            Formula::Not(f) => 1 + f.node_count(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::node_count).sum::<usize>(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    pub fn eval(&self, assignment: &impl Fn(Var) -> bool) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(v) => assignment(*v),
            Formula::Not(f) => !f.eval(assignment),
            Formula::And(fs) => fs.iter().all(|f| f.eval(assignment)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(assignment)),
            Formula::Implies(a, b) => !a.eval(assignment) || b.eval(assignment),
            Formula::Iff(a, b) => a.eval(assignment) == b.eval(assignment),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var(v) => {
                out.insert(*v);
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn display<'a>(&'a self, table: &'a AtomTable) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, table }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    table: &'a AtomTable,
}

impl<'a> fmt::Display for FormulaDisplay<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |g: &'a Formula| FormulaDisplay { formula: g, table: self.table };
        let join = |f: &mut fmt::Formatter<'_>, fs: &[Formula], op: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{}", FormulaDisplay { formula: g, table: self.table })?;
            }
            write!(f, ")")
        };
        match self.formula {
            Formula::Const(true) => write!(f, "⊤"),
            Formula::Const(false) => write!(f, "⊥"),
            Formula::Var(v) => write!(f, "{}", v.display(self.table)),
            Formula::Not(g) => write!(f, "¬{}", sub(g)),
            Formula::And(fs) => join(f, fs, "∧"),
            Formula::Or(fs) => join(f, fs, "∨"),
            Formula::Implies(a, b) => write!(f, "({} → {})", sub(a), sub(b)),
            Formula::Iff(a, b) => write!(f, "({} ↔ {})", sub(a), sub(b)),
        }
    }
}
