//! Answer sets of dual-normal programs as models of a propositional formula.
//!
//! For every atom `m` the level variables `a^i_m` simulate the elimination
//! chain of the positive program that decides minimality at `m`; `t^p_m`
//! false means the chain reached `t`.

use std::collections::{BTreeSet, HashMap};

use crate::ast::{split, Atom, AtomSet, Program, Rule};
use crate::error::{Error, Result};

use super::cnf::{tseitin_cnf_with_layout, CnfInstance};
use super::formula::{Formula, LevelAtom, Var};
use super::solver::{enumerate_models, SolverLimits};

/// `P ⊓ B`: the rules whose positive body is exactly `B`.
pub fn rules_with_pos_body(program: &Program, body: &AtomSet) -> Program {
    program.filter(|r| r.pos == *body)
}

fn level(m: Atom, i: usize, a: LevelAtom) -> Formula {
    Formula::var(Var::level(m, i, a))
}

fn require_atom(program: &Program, m: Atom, atoms: &AtomSet) -> Result<()> {
    if atoms.contains(&m) {
        Ok(())
    } else if m.index() < program.table().len() {
        Err(Error::UnknownAtom(program.name(m).to_owned()))
    } else {
        Err(Error::UnknownAtom(format!("#{}", m.index())))
    }
}

/// `F⁰_m = ¬m⁰_m ∧ t⁰_m ∧ ⋀_{a ≠ m} (a⁰_m ↔ a)`.
pub fn build_f0(program: &Program, m: Atom) -> Result<Formula> {
    let atoms = program.atoms();
    require_atom(program, m, &atoms)?;
    Ok(f0(&atoms, m))
}

fn f0(atoms: &AtomSet, m: Atom) -> Formula {
    let mut parts = vec![Formula::not(level(m, 0, LevelAtom::Atom(m))), level(m, 0, LevelAtom::T)];
    parts.extend(
        atoms
            .iter()
            .filter(|&&a| a != m)
            .map(|&a| Formula::iff(level(m, 0, LevelAtom::Atom(a)), Formula::base(a))),
    );
    Formula::and(parts)
}

/// Proper rules grouped by their (at most singleton) positive body.
struct Groups<'p> {
    by_body: HashMap<Option<Atom>, Vec<&'p Rule>>,
}

impl<'p> Groups<'p> {
    fn new(proper: &'p Program) -> Self {
        let mut by_body: HashMap<Option<Atom>, Vec<&Rule>> = HashMap::new();
        for r in proper.rules() {
            by_body.entry(r.pos.first().copied()).or_default().push(r);
        }
        Groups { by_body }
    }

    /// `Cⁱ_m(R)`: every rule of the group has a head atom alive at level
    /// `i - 1` or a blocked negative body.
    fn c(&self, body: Option<Atom>, m: Atom, i: usize) -> Formula {
        let rules = self.by_body.get(&body).map(Vec::as_slice).unwrap_or(&[]);
        Formula::and(rules.iter().map(|r| {
            Formula::or(
                r.head
                    .iter()
                    .map(|&h| level(m, i - 1, LevelAtom::Atom(h)))
                    .chain(r.neg.iter().map(|&c| Formula::base(c))),
            )
        }))
    }
}

fn fi(atoms: &AtomSet, groups: &Groups, m: Atom, i: usize) -> Formula {
    let mut parts: Vec<Formula> = atoms
        .iter()
        .filter(|&&a| a != m)
        .map(|&a| {
            let step = Formula::and([level(m, i - 1, LevelAtom::Atom(a)), groups.c(Some(a), m, i)]);
            Formula::iff(level(m, i, LevelAtom::Atom(a)), step)
        })
        .collect();
    let step = Formula::and([level(m, i - 1, LevelAtom::T), groups.c(None, m, i)]);
    parts.push(Formula::iff(level(m, i, LevelAtom::T), step));
    Formula::and(parts)
}

/// `Fⁱ_m` for `1 ≤ i ≤ |at(P)|`.
pub fn build_fi(program: &Program, m: Atom, i: usize) -> Result<Formula> {
    if !program.rules().all(Rule::is_dual_normal) {
        return Err(Error::NotDualNormal);
    }
    let atoms = program.atoms();
    require_atom(program, m, &atoms)?;
    if i == 0 || i > atoms.len() {
        return Err(Error::LevelOutOfRange { level: i, max: atoms.len() });
    }
    let (proper, _) = split(program);
    Ok(fi(&atoms, &Groups::new(&proper), m, i))
}

/// `F_Mod`: the clauses of `P` read classically.
pub fn build_fmod(program: &Program) -> Formula {
    Formula::and(program.rules().map(|r| {
        Formula::or(
            r.head
                .iter()
                .chain(&r.neg)
                .map(|&a| Formula::base(a))
                .chain(r.pos.iter().map(|&a| Formula::not(Formula::base(a)))),
        )
    }))
}

/// `F(P) = F_Mod ∧ ⋀_a [a → (⋀_{i=0}^p Fⁱ_a ∧ ¬tᵖ_a)]` with `p = |at(P)|`.
pub fn build_f(program: &Program) -> Result<Formula> {
    if !program.rules().all(Rule::is_dual_normal) {
        return Err(Error::NotDualNormal);
    }
    let atoms = program.atoms();
    let p = atoms.len();
    let (proper, _) = split(program);
    let groups = Groups::new(&proper);
    let mut parts = vec![build_fmod(program)];
    for &a in &atoms {
        let mut chain = vec![f0(&atoms, a)];
        chain.extend((1..=p).map(|i| fi(&atoms, &groups, a, i)));
        chain.push(Formula::not(level(a, p, LevelAtom::T)));
        parts.push(Formula::implies(Formula::base(a), Formula::and(chain)));
    }
    Ok(Formula::and(parts))
}

/// Every variable the encoding of `P` may use, in DIMACS order.
pub fn encoding_layout(program: &Program) -> Vec<Var> {
    let atoms = program.atoms();
    let p = atoms.len();
    let mut layout: Vec<Var> = atoms.iter().map(|&a| Var::Base(a)).collect();
    layout.push(Var::T0);
    for &m in &atoms {
        for i in 0..=p {
            layout.extend(atoms.iter().map(|&a| Var::level(m, i, LevelAtom::Atom(a))));
            layout.push(Var::level(m, i, LevelAtom::T));
        }
    }
    layout
}

/// `F(P)` in CNF, numbered by [`encoding_layout`] and labelled with atom names.
pub fn sat_instance(program: &Program) -> Result<CnfInstance> {
    let f = build_f(program)?;
    Ok(tseitin_cnf_with_layout(&f, &encoding_layout(program)).with_labels(program.table()))
}

/// Base atoms true in a full assignment of `cnf`.
pub fn decode_model(cnf: &CnfInstance, model: &[bool]) -> AtomSet {
    (1..=cnf.num_vars())
        .filter(|&v| model.get(v as usize).copied().unwrap_or(false))
        .filter_map(|v| match cnf.var(v) {
            Some(Var::Base(a)) => Some(a),
            _ => None,
        })
        .collect()
}

pub fn answer_sets_via_sat(program: &Program) -> Result<BTreeSet<AtomSet>> {
    answer_sets_via_sat_with(program, SolverLimits::default())
}

pub fn answer_sets_via_sat_with(program: &Program, limits: SolverLimits) -> Result<BTreeSet<AtomSet>> {
    let cnf = sat_instance(program)?;
    let project: Vec<u32> = program.atoms().iter().filter_map(|&a| cnf.index_of(Var::Base(a))).collect();
    Ok(enumerate_models(&cnf, &project, limits)?.iter().map(|m| decode_model(&cnf, m)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;
    use crate::sat::tseitin_cnf;

    fn sets(p: &Program, list: &[&[&str]]) -> BTreeSet<AtomSet> {
        list.iter().map(|names| p.table().lookup_all(names.iter().copied()).unwrap()).collect()
    }

    #[test]
    fn pos_body_selection() {
        let p = parse_program("a :- b. c.").unwrap();
        let b = p.atom("b").unwrap();
        assert!(rules_with_pos_body(&p, &[b].into()).same_rules(&parse_program("a :- b.").unwrap()));
        assert_eq!(rules_with_pos_body(&p, &AtomSet::new()).len(), 1);
        let a = p.atom("a").unwrap();
        assert!(rules_with_pos_body(&p, &[a].into()).is_empty());
    }

    #[test]
    fn f0_shape() {
        let p = parse_program("a | b.").unwrap();
        let (a, b) = (p.atom("a").unwrap(), p.atom("b").unwrap());
        let expected = Formula::and([
            Formula::not(level(a, 0, LevelAtom::Atom(a))),
            level(a, 0, LevelAtom::T),
            Formula::iff(level(a, 0, LevelAtom::Atom(b)), Formula::base(b)),
        ]);
        assert_eq!(build_f0(&p, a).unwrap(), expected);
        let single = parse_program("m.").unwrap();
        let m = single.atom("m").unwrap();
        assert_eq!(
            build_f0(&single, m).unwrap(),
            Formula::and([Formula::not(level(m, 0, LevelAtom::Atom(m))), level(m, 0, LevelAtom::T)])
        );
        let mut other = p.clone();
        let z = other.table_mut().intern("z");
        assert_eq!(build_f0(&other, z), Err(Error::UnknownAtom("z".into())));
    }

    #[test]
    fn fi_shape() {
        let p = parse_program("a | b.").unwrap();
        let (a, b) = (p.atom("a").unwrap(), p.atom("b").unwrap());
        let f = build_fi(&p, a, 1).unwrap();
        let t_step = Formula::iff(
            level(a, 1, LevelAtom::T),
            Formula::and([
                level(a, 0, LevelAtom::T),
                Formula::or([level(a, 0, LevelAtom::Atom(a)), level(a, 0, LevelAtom::Atom(b))]),
            ]),
        );
        let b_step = Formula::iff(level(a, 1, LevelAtom::Atom(b)), level(a, 0, LevelAtom::Atom(b)));
        assert_eq!(f, Formula::and([b_step, t_step]));
        assert_eq!(build_fi(&p, a, 0), Err(Error::LevelOutOfRange { level: 0, max: 2 }));
        assert_eq!(build_fi(&p, a, 3), Err(Error::LevelOutOfRange { level: 3, max: 2 }));
        let normal = parse_program("c :- a, b.").unwrap();
        assert_eq!(build_fi(&normal, normal.atom("a").unwrap(), 1), Err(Error::NotDualNormal));
    }

    #[test]
    fn fi_negative_body_contribution() {
        let p = parse_program("b :- a, not c.").unwrap();
        let (a, b, c) = (p.atom("a").unwrap(), p.atom("b").unwrap(), p.atom("c").unwrap());
        let f = build_fi(&p, c, 1).unwrap();
        let a_step = Formula::iff(
            level(c, 1, LevelAtom::Atom(a)),
            Formula::and([
                level(c, 0, LevelAtom::Atom(a)),
                Formula::or([level(c, 0, LevelAtom::Atom(b)), Formula::base(c)]),
            ]),
        );
        match f {
            Formula::And(parts) => assert!(parts.contains(&a_step)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fmod_examples() {
        let p = parse_program("a | b.").unwrap();
        let (a, b) = (p.atom("a").unwrap(), p.atom("b").unwrap());
        assert_eq!(build_fmod(&p), Formula::or([Formula::base(a), Formula::base(b)]));
        let p = parse_program(":- a, b.").unwrap();
        let (a, b) = (p.atom("a").unwrap(), p.atom("b").unwrap());
        assert_eq!(build_fmod(&p), Formula::or([Formula::not(Formula::base(a)), Formula::not(Formula::base(b))]));
        let p = parse_program(":- not c.").unwrap();
        assert_eq!(build_fmod(&p), Formula::base(p.atom("c").unwrap()));
    }

    #[test]
    fn f_of_empty_program_is_true() {
        assert_eq!(build_f(&Program::default()).unwrap(), Formula::Const(true));
        assert_eq!(build_f(&parse_program("c :- a, b.").unwrap()), Err(Error::NotDualNormal));
    }

    #[test]
    fn small_programs_via_sat() {
        let p = parse_program("a :- not b. b :- not a.").unwrap();
        assert_eq!(answer_sets_via_sat(&p).unwrap(), sets(&p, &[&["a"], &["b"]]));
        let p = parse_program("a | b.").unwrap();
        assert_eq!(answer_sets_via_sat(&p).unwrap(), sets(&p, &[&["a"], &["b"]]));
        let p = parse_program("a :- not a.").unwrap();
        assert!(answer_sets_via_sat(&p).unwrap().is_empty());
        let r5 = parse_program("a | b. :- not c. a :- c. b :- c.").unwrap();
        assert!(answer_sets_via_sat(&r5).unwrap().is_empty());
        assert_eq!(answer_sets_via_sat(&Program::default()).unwrap(), [AtomSet::new()].into());
    }

    #[test]
    fn cnf_examples() {
        let p = parse_program("a | b.").unwrap();
        let cnf = tseitin_cnf(&build_fmod(&p));
        assert_eq!(cnf.clauses(), &[vec![1, 2]]);
        let cnf = sat_instance(&p).unwrap();
        assert_eq!(cnf.label(1), Some("a"));
        assert_eq!(cnf.label(3), Some("__t"));
        assert_eq!(cnf.label(4), Some("a^0_a"));
        assert_eq!(cnf.label(6), Some("__t^0_a"));
        let project = [1, 2];
        let models = enumerate_models(&cnf, &project, SolverLimits::default()).unwrap();
        assert_eq!(models.len(), 2);
    }
}
