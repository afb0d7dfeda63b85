//! Seeded random generators for programs, SE-sets and reduction inputs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ast::{Atom, AtomSet, AtomTable, Program, Rule};
use crate::oracle::OracleBudget;
use crate::reductions::{Cnf3, Literal, Qbf2E};
use crate::se::{se_models_over, se_properties, ue_models, SEPair, SESet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProgramClass {
    General,
    Normal,
    DualNormal,
    DualHorn,
    Singular,
    Positive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProgramShape {
    pub class: ProgramClass,
    pub atoms: usize,
    pub rules: usize,
    pub max_head: usize,
    pub max_pos: usize,
    pub max_neg: usize,
    /// Probability in percent that a rule is a constraint.
    pub constraint_percent: u32,
}

impl ProgramShape {
    pub fn new(class: ProgramClass, atoms: usize, rules: usize) -> Self {
        ProgramShape { class, atoms, rules, max_head: 3, max_pos: 2, max_neg: 2, constraint_percent: 15 }
    }
}

/// `a`, `b`, ..., `z`, then `a26`, `a27`, ...
pub fn atom_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("a{i}")
    }
}

/// A table holding the first `n` generated atom names.
pub fn atom_table(n: usize) -> AtomTable {
    let mut table = AtomTable::new();
    for i in 0..n {
        table.intern(&atom_name(i));
    }
    table
}

fn sample(rng: &mut impl Rng, atoms: &[Atom], k: usize) -> AtomSet {
    atoms.choose_multiple(rng, k.min(atoms.len())).copied().collect()
}

/// A random program of the requested class. All `shape.atoms` atoms are in
/// the table, whether or not they occur in a rule.
pub fn random_program(rng: &mut impl Rng, shape: &ProgramShape) -> Program {
    use ProgramClass::*;
    let table = atom_table(shape.atoms);
    let atoms: Vec<Atom> = table.atoms().collect();
    let mut program = Program::new(table);
    if atoms.is_empty() {
        return program;
    }
    for _ in 0..shape.rules {
        let constraint = rng.gen_range(0..100) < shape.constraint_percent;
        let max_head = match shape.class {
            Normal | Singular => 1,
            _ => shape.max_head,
        };
        let head_len = if constraint { 0 } else { rng.gen_range(1..=max_head.max(1)) };
        let max_pos = match shape.class {
            DualNormal | Singular if !constraint => shape.max_pos.min(1),
            DualHorn => shape.max_pos.min(1),
            _ => shape.max_pos,
        };
        let max_neg = match shape.class {
            DualHorn | Positive => 0,
            _ => shape.max_neg,
        };
        let head = sample(rng, &atoms, head_len);
        let pos_len = rng.gen_range(0..=max_pos);
        let pos = sample(rng, &atoms, pos_len);
        let neg_len = rng.gen_range(0..=max_neg);
        let neg = sample(rng, &atoms, neg_len);
        let rule = if head.is_empty() && pos.is_empty() && neg.is_empty() {
            Rule::fact(*atoms.choose(rng).expect("non-empty"))
        } else {
            Rule { head, pos, neg }
        };
        program.push(rule);
    }
    program
}

fn random_subset(rng: &mut impl Rng, atoms: &[Atom]) -> AtomSet {
    atoms.iter().filter(|_| rng.gen_bool(0.5)).copied().collect()
}

/// A random SE-set over `n` atoms that is complete and closed under
/// here-union.
pub fn random_se_set(rng: &mut impl Rng, n: usize) -> (SESet, AtomTable) {
    let table = atom_table(n);
    let atoms: Vec<Atom> = table.atoms().collect();
    let mut set = SESet::new(atoms.iter().copied().collect());
    let totals = rng.gen_range(0..=3);
    for _ in 0..totals {
        let y = random_subset(rng, &atoms);
        let ys: Vec<Atom> = y.iter().copied().collect();
        set.pairs.insert(SEPair::new(y.clone(), y.clone()));
        for _ in 0..rng.gen_range(0..=2) {
            set.pairs.insert(SEPair::new(random_subset(rng, &ys), y.clone()));
        }
    }
    loop {
        let before = set.pairs.len();
        let totals: Vec<AtomSet> = set.pairs.iter().filter(|p| p.here == p.there).map(|p| p.there.clone()).collect();
        let lifted: Vec<SEPair> = set
            .pairs
            .iter()
            .flat_map(|p| {
                totals.iter().filter(|z| p.there.is_subset(z)).map(|z| SEPair::new(p.here.clone(), z.clone()))
            })
            .collect();
        set.pairs.extend(lifted);
        let unions: Vec<SEPair> = set
            .by_there()
            .into_iter()
            .flat_map(|(y, heres)| {
                let heres: Vec<&AtomSet> = heres.into_iter().collect();
                let mut out = Vec::new();
                for a in &heres {
                    for b in &heres {
                        out.push(SEPair::new(a.union(b).copied().collect(), y.clone()));
                    }
                }
                out
            })
            .collect();
        set.pairs.extend(unions);
        if set.pairs.len() == before {
            break;
        }
    }
    debug_assert!({
        let props = se_properties(&set);
        props.complete && props.closed_here_union
    });
    (set, table)
}

/// The UE-set of a random program over `n` atoms that is UE-complete and
/// splittable. General programs are tried first; dual-normal ones always
/// qualify.
pub fn random_ue_set(rng: &mut impl Rng, n: usize) -> (SESet, AtomTable) {
    let budget = OracleBudget::default();
    for attempt in 0..8 {
        let class = if attempt < 4 { ProgramClass::General } else { ProgramClass::DualNormal };
        let rules = rng.gen_range(0..=n + 2);
        let p = random_program(rng, &ProgramShape::new(class, n, rules));
        let universe: AtomSet = p.table().atoms().collect();
        let ue = ue_models(&se_models_over(&p, &universe, budget).expect("small universe"));
        let props = se_properties(&ue);
        if props.ue_complete && props.splittable {
            return (ue, p.table().clone());
        }
    }
    let table = atom_table(n);
    (SESet::new(table.atoms().collect()), table)
}

fn random_literal(rng: &mut impl Rng, vars: usize) -> Literal {
    Literal { var: rng.gen_range(0..vars), positive: rng.gen_bool(0.5) }
}

/// `∃x1..∀y1..` with `terms` random three-literal terms. Needs at least one
/// variable when `terms > 0`.
pub fn random_qbf(rng: &mut impl Rng, exists: usize, forall: usize, terms: usize) -> Qbf2E {
    let mut qbf = Qbf2E::default();
    for i in 0..exists {
        qbf.declare_exists(&format!("x{}", i + 1)).expect("distinct names");
    }
    for i in 0..forall {
        qbf.declare_forall(&format!("y{}", i + 1)).expect("distinct names");
    }
    let vars = exists + forall;
    for _ in 0..terms {
        qbf.terms.push([random_literal(rng, vars), random_literal(rng, vars), random_literal(rng, vars)]);
    }
    qbf
}

/// A random 3-CNF over variables `v1..v{vars}`.
pub fn random_cnf3(rng: &mut impl Rng, vars: usize, clauses: usize) -> Cnf3 {
    let mut cnf = Cnf3::default();
    for i in 0..vars {
        cnf.intern(&format!("v{}", i + 1));
    }
    for _ in 0..clauses {
        cnf.clauses.push([random_literal(rng, vars), random_literal(rng, vars), random_literal(rng, vars)]);
    }
    cnf
}
