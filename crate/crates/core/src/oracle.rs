//! Reference semantics by exhaustive enumeration, plus a search-based
//! answer-set enumerator for programs too large for subset enumeration.

use std::collections::{BTreeSet, HashMap};

use crate::ast::{align, split, Atom, AtomSet, Program, Rule};
use crate::dual_horn::pmm;
use crate::error::{Error, Result};
use crate::sat::{enumerate_models, solve_with, tseitin_cnf_with_layout, CnfInstance, Formula, SolverLimits, Var};
use crate::se::{se_models_over, ue_models, SEPair, SESet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_atoms: usize,
    pub max_subsets: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_atoms: 22, max_subsets: 1 << 22 }
    }
}

impl OracleBudget {
    pub fn with_max_atoms(max_atoms: usize) -> Self {
        OracleBudget { max_atoms, max_subsets: 1u64 << max_atoms.min(63) }
    }

    pub fn check(&self, atoms: usize) -> Result<()> {
        let cap = self.max_atoms.min(63 - self.max_subsets.leading_zeros() as usize);
        if atoms > cap {
            Err(Error::BudgetExceeded { atoms, max: cap })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct MaskRule {
    pub head: u64,
    pub pos: u64,
    pub neg: u64,
}

/// A program over a universe of at most 63 atoms with sets as bitmasks.
#[derive(Clone, Debug)]
pub(crate) struct Masked {
    pub universe: Vec<Atom>,
    bit: HashMap<Atom, u32>,
    pub rules: Vec<MaskRule>,
}

impl Masked {
    pub fn new(program: &Program, universe: &AtomSet) -> Self {
        let universe: Vec<Atom> = universe.iter().copied().collect();
        let bit: HashMap<Atom, u32> = universe.iter().enumerate().map(|(i, &a)| (a, i as u32)).collect();
        let mut m = Masked { universe, bit, rules: Vec::new() };
        m.rules = program
            .rules()
            .map(|r| MaskRule { head: m.mask(&r.head), pos: m.mask(&r.pos), neg: m.mask(&r.neg) })
            .collect();
        m
    }

    pub fn full(&self) -> u64 {
        if self.universe.is_empty() {
            0
        } else {
            u64::MAX >> (64 - self.universe.len())
        }
    }

    pub fn mask(&self, set: &AtomSet) -> u64 {
        set.iter().fold(0, |acc, a| acc | 1u64 << self.bit[a])
    }

    pub fn set(&self, mask: u64) -> AtomSet {
        self.universe.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a).collect()
    }

    pub fn is_model(&self, i: u64) -> bool {
        self.rules.iter().all(|r| r.head & i != 0 || r.neg & i != 0 || r.pos & !i != 0)
    }

    /// `X ⊨ P^Y`.
    pub fn reduct_model(&self, x: u64, y: u64) -> bool {
        self.rules.iter().all(|r| r.neg & y != 0 || r.head & x != 0 || r.pos & !x != 0)
    }

    pub fn models(&self) -> Vec<u64> {
        (0..=self.full()).filter(|&i| self.is_model(i)).collect()
    }

    pub fn is_answer_set(&self, m: u64) -> bool {
        self.is_model(m) && proper_submasks(m).all(|x| !self.reduct_model(x, m))
    }
}

/// Proper submasks of `m` in decreasing numeric order.
pub(crate) fn proper_submasks(m: u64) -> impl Iterator<Item = u64> {
    let mut next = if m == 0 { None } else { Some((m - 1) & m) };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

fn minimal(masks: &[u64]) -> Vec<u64> {
    masks.iter().copied().filter(|&m| !masks.iter().any(|&n| n != m && n & !m == 0)).collect()
}

fn masked(program: &Program, universe: &AtomSet, budget: OracleBudget) -> Result<Masked> {
    budget.check(universe.len())?;
    Ok(Masked::new(program, universe))
}

pub fn models(program: &Program, budget: OracleBudget) -> Result<BTreeSet<AtomSet>> {
    models_over(program, &program.atoms(), budget)
}

/// Models over an explicit universe, which must contain `at(P)`.
pub fn models_over(program: &Program, universe: &AtomSet, budget: OracleBudget) -> Result<BTreeSet<AtomSet>> {
    let m = masked(program, universe, budget)?;
    Ok(m.models().into_iter().map(|i| m.set(i)).collect())
}

pub fn minimal_models(program: &Program, budget: OracleBudget) -> Result<BTreeSet<AtomSet>> {
    let m = masked(program, &program.atoms(), budget)?;
    Ok(minimal(&m.models()).into_iter().map(|i| m.set(i)).collect())
}

/// Answer sets by definition: models `M` of `P` minimal among the models of `P^M`.
pub fn answer_sets_bf(program: &Program, budget: OracleBudget) -> Result<BTreeSet<AtomSet>> {
    let universe = program.atoms();
    let m = masked(program, &universe, budget)?;
    let result: BTreeSet<AtomSet> =
        (0..=m.full()).filter(|&i| m.is_answer_set(i)).map(|i| m.set(i)).collect();
    if cfg!(debug_assertions) {
        let (proper, constraints) = split(program);
        let mp = Masked::new(&proper, &universe);
        let mc = Masked::new(&constraints, &universe);
        let via_split: BTreeSet<AtomSet> =
            (0..=m.full()).filter(|&i| mc.is_model(i) && mp.is_answer_set(i)).map(|i| m.set(i)).collect();
        debug_assert_eq!(result, via_split, "answer sets must split into proper rules and constraints");
    }
    Ok(result)
}

/// `M ⊨ P` and, for every `m ∈ M`, `P^{M,m}` has no model.
pub fn is_answer_set(program: &Program, interp: &AtomSet, budget: OracleBudget) -> Result<bool> {
    let universe = program.atoms();
    if !interp.is_subset(&universe) {
        return Err(Error::NotInUniverse);
    }
    budget.check(universe.len())?;
    if !crate::ast::is_model(interp, program) {
        return Ok(false);
    }
    for &m in interp {
        let check = pmm(program, interp, m)?;
        if !Masked::new(&check, &universe).models().is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn joint(p: &Program, q: &Program) -> (Program, Program, AtomSet) {
    let (p, q) = align(p, q);
    let universe: AtomSet = p.atoms().union(&q.atoms()).copied().collect();
    (p, q, universe)
}

pub fn equivalent_as(p: &Program, q: &Program, budget: OracleBudget) -> Result<bool> {
    let (p, q, _) = joint(p, q);
    Ok(answer_sets_bf(&p, budget)? == answer_sets_bf(&q, budget)?)
}

fn first_difference(a: &SESet, b: &SESet) -> Option<SEPair> {
    a.pairs.symmetric_difference(&b.pairs).next().cloned()
}

/// Some SE-model of exactly one of the programs, over their joint universe.
/// Atom ids refer to the table of `align(p, q).0`.
pub fn strong_equivalence_witness(p: &Program, q: &Program, budget: OracleBudget) -> Result<Option<SEPair>> {
    let (p, q, universe) = joint(p, q);
    Ok(first_difference(&se_models_over(&p, &universe, budget)?, &se_models_over(&q, &universe, budget)?))
}

/// Some UE-model of exactly one of the programs; ids as in
/// [`strong_equivalence_witness`].
pub fn uniform_equivalence_witness(p: &Program, q: &Program, budget: OracleBudget) -> Result<Option<SEPair>> {
    let (p, q, universe) = joint(p, q);
    let up = ue_models(&se_models_over(&p, &universe, budget)?);
    let uq = ue_models(&se_models_over(&q, &universe, budget)?);
    Ok(first_difference(&up, &uq))
}

pub fn strongly_equivalent_bf(p: &Program, q: &Program, budget: OracleBudget) -> Result<bool> {
    Ok(strong_equivalence_witness(p, q, budget)?.is_none())
}

pub fn uniformly_equivalent_bf(p: &Program, q: &Program, budget: OracleBudget) -> Result<bool> {
    Ok(uniform_equivalence_witness(p, q, budget)?.is_none())
}

/// Answer sets by generate-and-test: supported models of `P` come from the
/// SAT solver, and each is kept iff no proper subset models its reduct.
/// Works for arbitrary disjunctive programs and scales past subset
/// enumeration.
pub fn answer_sets_search(program: &Program) -> Result<BTreeSet<AtomSet>> {
    answer_sets_search_with(program, SolverLimits::default())
}

pub fn answer_sets_search_with(program: &Program, limits: SolverLimits) -> Result<BTreeSet<AtomSet>> {
    let atoms = program.atoms();
    let base = |a: Atom| Formula::base(a);
    let classical = program.rules().map(|r| {
        Formula::or(r.head.iter().chain(&r.neg).map(|&a| base(a)).chain(r.pos.iter().map(|&a| Formula::not(base(a)))))
    });
    let support = atoms.iter().map(|&a| {
        let reasons = program.rules().filter(|r| r.head.contains(&a)).map(|r| {
            Formula::and(
                r.pos
                    .iter()
                    .map(|&b| base(b))
                    .chain(r.neg.iter().map(|&c| Formula::not(base(c))))
                    .chain(r.head.iter().filter(|&&h| h != a).map(|&h| Formula::not(base(h)))),
            )
        });
        Formula::implies(base(a), Formula::or(reasons))
    });
    let f = Formula::and(classical.chain(support));
    let layout: Vec<Var> = atoms.iter().map(|&a| Var::Base(a)).collect();
    let cnf = tseitin_cnf_with_layout(&f, &layout);
    let project: Vec<u32> = (1..=atoms.len() as u32).collect();
    let mut out = BTreeSet::new();
    for model in enumerate_models(&cnf, &project, limits)? {
        let m: AtomSet = atoms.iter().enumerate().filter(|(i, _)| model[i + 1]).map(|(_, &a)| a).collect();
        if !has_smaller_reduct_model(program, &m, limits)? {
            out.insert(m);
        }
    }
    Ok(out)
}

/// Whether some `X ⊊ M` satisfies `P^M`.
fn has_smaller_reduct_model(program: &Program, m: &AtomSet, limits: SolverLimits) -> Result<bool> {
    if m.is_empty() {
        return Ok(false);
    }
    let index: HashMap<Atom, i32> = m.iter().enumerate().map(|(i, &a)| (a, i as i32 + 1)).collect();
    let mut clauses = Vec::new();
    for r in program.rules().filter(|r| r.neg.is_disjoint(m) && r.pos.is_subset(m)) {
        let clause: Vec<i32> = r
            .head
            .iter()
            .filter_map(|h| index.get(h).copied())
            .chain(r.pos.iter().map(|b| -index[b]))
            .collect();
        clauses.push(clause);
    }
    clauses.push(index.values().map(|&v| -v).collect());
    Ok(solve_with(&CnfInstance::new(m.len() as u32, clauses), limits)?.is_some())
}

/// Minimal models of a positive program, through [`answer_sets_search`].
pub fn minimal_models_search(program: &Program) -> Result<BTreeSet<AtomSet>> {
    if !program.rules().all(Rule::is_positive) {
        return Err(Error::Precondition("minimal_models_search needs a positive program".into()));
    }
    answer_sets_search(program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_program, ProgramClass, ProgramShape};
    use crate::parser::parse_program;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const P5: &str = "a | b. :- not c. c :- a, b. a :- c. b :- c.";
    const Q5: &str = ":- not c. c :- a, b. a :- c. b :- c.";
    const R5: &str = "a | b. :- not c. a :- c. b :- c.";

    fn b() -> OracleBudget {
        OracleBudget::default()
    }

    fn sets(p: &Program, list: &[&[&str]]) -> BTreeSet<AtomSet> {
        list.iter().map(|names| p.table().lookup_all(names.iter().copied()).unwrap()).collect()
    }

    fn prog(s: &str) -> Program {
        parse_program(s).unwrap()
    }

    #[test]
    fn models_examples() {
        let p = prog("a | b.");
        assert_eq!(models(&p, b()).unwrap(), sets(&p, &[&["a"], &["b"], &["a", "b"]]));
        assert!(models(&prog(":- a. a."), b()).unwrap().is_empty());
        let p = prog("b | c :- a. :- b. :- c.");
        assert_eq!(models(&p, b()).unwrap(), [AtomSet::new()].into());
    }

    #[test]
    fn minimal_models_examples() {
        let p = prog("a | b.");
        assert_eq!(minimal_models(&p, b()).unwrap(), sets(&p, &[&["a"], &["b"]]));
        let p = prog("a. b :- a.");
        assert_eq!(minimal_models(&p, b()).unwrap(), sets(&p, &[&["a", "b"]]));
        assert_eq!(minimal_models(&prog("b | c :- a."), b()).unwrap(), [AtomSet::new()].into());
    }

    #[test]
    fn answer_set_examples() {
        let p = prog("a | b.");
        assert_eq!(answer_sets_bf(&p, b()).unwrap(), sets(&p, &[&["a"], &["b"]]));
        assert!(answer_sets_bf(&prog(P5), b()).unwrap().is_empty());
        let p = prog("a :- not b. b :- not a.");
        assert_eq!(answer_sets_bf(&p, b()).unwrap(), sets(&p, &[&["a"], &["b"]]));
    }

    #[test]
    fn is_answer_set_examples() {
        let p = prog("a | b.");
        let s = |names: &[&str]| p.table().lookup_all(names.iter().copied()).unwrap();
        assert!(is_answer_set(&p, &s(&["a"]), b()).unwrap());
        assert!(!is_answer_set(&p, &s(&["a", "b"]), b()).unwrap());
        assert!(!is_answer_set(&p, &AtomSet::new(), b()).unwrap());
        assert!(is_answer_set(&prog(":- a. b :- a."), &AtomSet::new(), b()).unwrap());
    }

    #[test]
    fn equivalence_examples() {
        assert!(equivalent_as(&prog("a."), &prog("a :- not b."), b()).unwrap());
        assert!(equivalent_as(&prog("a | b."), &prog("a :- not b. b :- not a."), b()).unwrap());
        assert!(!equivalent_as(&prog("a."), &prog("b."), b()).unwrap());

        assert!(strongly_equivalent_bf(&prog(P5), &prog(P5), b()).unwrap());
        assert!(!strongly_equivalent_bf(&prog(P5), &prog(Q5), b()).unwrap());
        assert!(strongly_equivalent_bf(&prog("a. :- a."), &prog("b. :- b."), b()).unwrap());

        assert!(uniformly_equivalent_bf(&prog(P5), &prog(Q5), b()).unwrap());
        assert!(!uniformly_equivalent_bf(&prog(P5), &prog(R5), b()).unwrap());
        assert!(uniformly_equivalent_bf(&prog(R5), &prog(R5), b()).unwrap());
    }

    #[test]
    fn witness_for_p5_q5() {
        let (p, q) = (prog(P5), prog(Q5));
        let w = strong_equivalence_witness(&p, &q, b()).unwrap().unwrap();
        assert!(w.here.is_empty());
        assert_eq!(w.there, p.atoms());
    }

    #[test]
    fn budget_is_enforced() {
        let text: String = (0..23).map(|i| format!("x{i}. ")).collect();
        assert_eq!(models(&prog(&text), b()), Err(Error::BudgetExceeded { atoms: 23, max: 22 }));
        let small = OracleBudget { max_atoms: 22, max_subsets: 1 << 3 };
        assert!(matches!(models(&prog("a. b. c. d."), small), Err(Error::BudgetExceeded { atoms: 4, max: 3 })));
    }

    #[test]
    fn search_on_larger_program() {
        let text: String = (0..8).map(|i| format!("x{i} :- not y{i}. y{i} :- not x{i}. ")).collect();
        let p = prog(&(text + ":- x0, x1."));
        let found = answer_sets_search(&p).unwrap();
        assert_eq!(found.len(), 256 - 64);
        assert!(found.iter().all(|m| m.len() == 8));
    }

    fn arb_general() -> impl Strategy<Value = Program> {
        (any::<u64>(), 1usize..6, 0usize..8).prop_map(|(seed, atoms, rules)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_program(&mut rng, &ProgramShape::new(ProgramClass::General, atoms, rules))
        })
    }

    proptest! {
        #[test]
        fn search_matches_brute_force(p in arb_general()) {
            prop_assert_eq!(answer_sets_search(&p).unwrap(), answer_sets_bf(&p, b()).unwrap());
        }

        #[test]
        fn prop2_matches_definition(p in arb_general()) {
            let as_bf = answer_sets_bf(&p, b()).unwrap();
            for m in models(&p, b()).unwrap() {
                prop_assert_eq!(is_answer_set(&p, &m, b()).unwrap(), as_bf.contains(&m));
                prop_assert!(crate::ast::is_model(&m, &p));
            }
        }

        #[test]
        fn equivalence_hierarchy(p in arb_general(), q in arb_general()) {
            let strong = strongly_equivalent_bf(&p, &q, b()).unwrap();
            let uniform = uniformly_equivalent_bf(&p, &q, b()).unwrap();
            let plain = equivalent_as(&p, &q, b()).unwrap();
            prop_assert!(!strong || uniform);
            prop_assert!(!uniform || plain);
        }
    }
}
