//! Reductions into programs: (2,∃)-QBF validity to consistency, and 3-CNF
//! unsatisfiability to strong equivalence of singular programs.

use std::collections::HashMap;

use crate::ast::{AtomTable, Program, Rule};
use crate::error::Result;
use crate::oracle::OracleBudget;
use crate::sat::{solve, CnfInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    fn holds(self, assignment: u64) -> bool {
        (assignment >> self.var & 1 == 1) == self.positive
    }
}

/// `∃X ∀Y D` with `D` a disjunction of three-literal terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Qbf2E {
    names: Vec<String>,
    universal: Vec<bool>,
    index: HashMap<String, usize>,
    pub terms: Vec<[Literal; 3]>,
}

impl Qbf2E {
    fn declare(&mut self, name: &str, universal: bool) -> std::result::Result<usize, String> {
        if self.index.contains_key(name) {
            return Err(format!("variable `{name}` is declared twice"));
        }
        self.names.push(name.to_owned());
        self.universal.push(universal);
        self.index.insert(name.to_owned(), self.names.len() - 1);
        Ok(self.names.len() - 1)
    }

    pub fn declare_exists(&mut self, name: &str) -> std::result::Result<usize, String> {
        self.declare(name, false)
    }

    pub fn declare_forall(&mut self, name: &str) -> std::result::Result<usize, String> {
        self.declare(name, true)
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn is_universal(&self, var: usize) -> bool {
        self.universal[var]
    }

    pub fn exists(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.names.len()).filter(|&v| !self.universal[v])
    }

    pub fn forall(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.names.len()).filter(|&v| self.universal[v])
    }
}

/// A conjunction of three-literal clauses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf3 {
    pub vars: Vec<String>,
    pub clauses: Vec<[Literal; 3]>,
}

impl Cnf3 {
    pub fn intern(&mut self, name: &str) -> usize {
        match self.vars.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                self.vars.push(name.to_owned());
                self.vars.len() - 1
            }
        }
    }
}

/// How universal atoms of a term are counted by [`is_complexity_sensitive_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strictness {
    /// `y` and `¬y` count as two; repeated occurrences of one literal count once.
    #[default]
    DistinctLiterals,
    /// Occurrences of one atom count once whatever their sign.
    DistinctAtoms,
}

/// Which consistency constraint [`unsat_to_singular_with`] emits per variable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UnsatEncoding {
    /// `⊥ ← v, v̄`.
    #[default]
    Consistent,
    /// `⊥ ← v, not v`, which every interpretation satisfies.
    Verbatim,
}

/// Truth of the QBF by enumerating both quantifier blocks.
pub fn qbf_eval(qbf: &Qbf2E, budget: OracleBudget) -> Result<bool> {
    budget.check(qbf.num_vars())?;
    let xs: Vec<usize> = qbf.exists().collect();
    let ys: Vec<usize> = qbf.forall().collect();
    let spread = |bits: u64, vars: &[usize]| -> u64 {
        vars.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).fold(0, |acc, (_, &v)| acc | 1 << v)
    };
    Ok((0u64..1 << xs.len()).any(|xb| {
        let x = spread(xb, &xs);
        (0u64..1 << ys.len()).all(|yb| {
            let a = x | spread(yb, &ys);
            qbf.terms.iter().any(|term| term.iter().all(|l| l.holds(a)))
        })
    }))
}

/// The program `P[F]`, consistent iff `F` is true. Variables keep their
/// names; `x̄` is `__n_x` and the saturation atom is `__w`.
pub fn qbf_to_program(qbf: &Qbf2E) -> Program {
    let mut table = AtomTable::new();
    let atoms: Vec<_> = (0..qbf.num_vars()).map(|v| table.intern(qbf.name(v))).collect();
    let bars: Vec<_> = (0..qbf.num_vars()).map(|v| table.fresh(&format!("__n_{}", qbf.name(v)))).collect();
    let w = table.fresh("__w");
    let mut program = Program::new(table);
    for x in qbf.exists() {
        program.push(Rule::new([atoms[x], bars[x]], [], []));
    }
    for y in qbf.forall() {
        program.push(Rule::new([atoms[y], bars[y]], [], []));
        program.push(Rule::new([atoms[y]], [w], []));
        program.push(Rule::new([bars[y]], [w], []));
    }
    for term in &qbf.terms {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for l in term {
            match (qbf.is_universal(l.var), l.positive) {
                (false, true) => neg.push(bars[l.var]),
                (false, false) => neg.push(atoms[l.var]),
                (true, true) => pos.push(atoms[l.var]),
                (true, false) => pos.push(bars[l.var]),
            }
        }
        program.push(Rule::new([w], pos, neg));
    }
    program.push(Rule::constraint([], [w]));
    program
}

pub fn is_complexity_sensitive(qbf: &Qbf2E) -> bool {
    is_complexity_sensitive_with(qbf, Strictness::default())
}

/// Every term mentions at most one universal atom, counted per `strictness`.
pub fn is_complexity_sensitive_with(qbf: &Qbf2E, strictness: Strictness) -> bool {
    qbf.terms.iter().all(|term| {
        let mut seen: Vec<(usize, bool)> = term
            .iter()
            .filter(|l| qbf.is_universal(l.var))
            .map(|l| match strictness {
                Strictness::DistinctLiterals => (l.var, l.positive),
                Strictness::DistinctAtoms => (l.var, true),
            })
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len() <= 1
    })
}

pub fn unsat_to_singular(cnf: &Cnf3) -> Program {
    unsat_to_singular_with(cnf, UnsatEncoding::default())
}

/// A singular program strongly equivalent to `{a.; :- a.}` iff `cnf` is
/// unsatisfiable. `v̄` is `__n_v`.
pub fn unsat_to_singular_with(cnf: &Cnf3, encoding: UnsatEncoding) -> Program {
    let mut table = AtomTable::new();
    let atoms: Vec<_> = cnf.vars.iter().map(|v| table.intern(v)).collect();
    let bars: Vec<_> = cnf.vars.iter().map(|v| table.fresh(&format!("__n_{v}"))).collect();
    let mut program = Program::new(table);
    for (&v, &vb) in atoms.iter().zip(&bars) {
        program.push(Rule::new([v], [], [vb]));
        program.push(Rule::new([vb], [], [v]));
        program.push(match encoding {
            UnsatEncoding::Consistent => Rule::constraint([v, vb], []),
            UnsatEncoding::Verbatim => Rule::constraint([v], [v]),
        });
    }
    for clause in &cnf.clauses {
        let neg = clause.iter().map(|l| if l.positive { atoms[l.var] } else { bars[l.var] });
        program.push(Rule::constraint([], neg));
    }
    debug_assert!(program.rules().all(|r| r.is_normal() && r.is_dual_normal()));
    program
}

pub fn cnf3_satisfiable(cnf: &Cnf3) -> Result<bool> {
    let clauses = cnf
        .clauses
        .iter()
        .map(|c| c.iter().map(|l| if l.positive { l.var as i32 + 1 } else { -(l.var as i32 + 1) }).collect())
        .collect();
    Ok(solve(&CnfInstance::new(cnf.vars.len() as u32, clauses))?.is_some())
}

/// The fixed reference program `{a.; :- a.}` of the strong-equivalence reduction.
pub fn inconsistent_reference() -> Program {
    let mut table = AtomTable::new();
    let a = table.intern("a");
    Program::from_rules(table, [Rule::fact(a), Rule::constraint([a], [])])
}

impl std::fmt::Display for Literal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", if self.positive { "" } else { "-" }, self.var)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_labels;
    use crate::oracle::{answer_sets_bf, strongly_equivalent_bf};
    use crate::parser::{parse_cnf3, parse_qbf, render_program};

    fn b() -> OracleBudget {
        OracleBudget::default()
    }

    #[test]
    fn qbf_examples() {
        let f = parse_qbf("exists x\nforall y\nterm x x y\nterm x x -y").unwrap();
        assert!(qbf_eval(&f, b()).unwrap());
        assert!(!answer_sets_bf(&qbf_to_program(&f), b()).unwrap().is_empty());

        let f = parse_qbf("exists x\nforall y\nterm x y x").unwrap();
        assert!(!qbf_eval(&f, b()).unwrap());
        assert!(answer_sets_bf(&qbf_to_program(&f), b()).unwrap().is_empty());

        let f = parse_qbf("exists x z\nterm x -z x").unwrap();
        assert!(qbf_eval(&f, b()).unwrap());
        let p = qbf_to_program(&f);
        assert!(p.rules().all(|r| !r.pos.iter().any(|&a| p.name(a) == "__w")));
    }

    #[test]
    fn term_rule_collapses_duplicates() {
        let f = parse_qbf("exists x\nforall y\nterm x x y").unwrap();
        let text = render_program(&qbf_to_program(&f));
        assert!(text.contains("__w :- y, not __n_x."), "{text}");
        assert!(text.contains(":- not __w."));
        assert!(text.contains("y :- __w."));
    }

    #[test]
    fn sensitivity_readings() {
        let f = parse_qbf("exists x\nforall y z\nterm x x y").unwrap();
        assert!(is_complexity_sensitive(&f));
        let f = parse_qbf("exists x\nforall y z\nterm y z x").unwrap();
        assert!(!is_complexity_sensitive(&f));
        let f = parse_qbf("exists x\nforall y\nterm y -y x").unwrap();
        assert!(!is_complexity_sensitive(&f));
        assert!(is_complexity_sensitive_with(&f, Strictness::DistinctAtoms));
        assert!(!classify_labels(&qbf_to_program(&f)).dual_normal);
    }

    #[test]
    fn unsat_examples() {
        let reference = inconsistent_reference();
        let f = parse_cnf3("clause x x x\nclause -x -x -x").unwrap();
        assert!(!cnf3_satisfiable(&f).unwrap());
        let p = unsat_to_singular(&f);
        assert!(classify_labels(&p).singular);
        assert!(strongly_equivalent_bf(&p, &reference, b()).unwrap());

        let f = parse_cnf3("clause x x x").unwrap();
        assert!(cnf3_satisfiable(&f).unwrap());
        assert!(!strongly_equivalent_bf(&unsat_to_singular(&f), &reference, b()).unwrap());
    }

    #[test]
    fn verbatim_constraint_is_vacuous() {
        let reference = inconsistent_reference();
        let f = parse_cnf3("clause x x x\nclause -x -x -x").unwrap();
        let p = unsat_to_singular_with(&f, UnsatEncoding::Verbatim);
        assert!(classify_labels(&p).singular);
        assert!(!strongly_equivalent_bf(&p, &reference, b()).unwrap());
    }

    #[test]
    fn numeric_names() {
        let f = parse_cnf3("clause 1 -2 3").unwrap();
        assert_eq!(f.vars, ["v1", "v2", "v3"]);
        assert_eq!(f.clauses[0][1], Literal::neg(1));
    }
}
