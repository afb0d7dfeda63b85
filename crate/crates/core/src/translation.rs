//! Head/body swapping translation into normal programs.
//!
//! For every `x ∈ at(P)` the customized program `P_x` turns each proper rule
//! `H ← B⁺, not B⁻` of `P_r[t]` into `B⁺_x ← H_x, not B⁻` over copies `y_x`.
//! [`translate`] glues the copies together with choice rules over `x`/`x̄`,
//! model constraints and the `t_x` checks. Dual-normal programs become
//! normal and normal programs become dual-normal.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::{is_model, reduct, split, Atom, AtomSet, AtomTable, Program, Rule};
use crate::error::{Error, Result};
use crate::oracle::{answer_sets_bf, answer_sets_search, minimal_models_search, OracleBudget};

/// What a copy atom `y_x` copies: a program atom or the fresh `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CopyBase {
    Atom(Atom),
    T,
}

/// The translated program together with the maps from the generated atoms
/// back to the source program.
#[derive(Clone, Debug)]
pub struct NormalTranslation {
    pub program: Program,
    /// `at(P)` in id order.
    pub base: Vec<Atom>,
    /// `x ↦ x̄`.
    pub neg: BTreeMap<Atom, Atom>,
    /// `(y, x) ↦ y_x`.
    pub copies: BTreeMap<(CopyBase, Atom), Atom>,
}

impl NormalTranslation {
    pub fn copy(&self, base: CopyBase, owner: Atom) -> Atom {
        self.copies[&(base, owner)]
    }

    /// `Y_x` for `Y ⊆ at(P)`.
    pub fn copy_set(&self, set: &AtomSet, owner: Atom) -> AtomSet {
        set.iter().map(|&y| self.copy(CopyBase::Atom(y), owner)).collect()
    }

    /// `M_P = M ∪ {x̄ | x ∈ at(P) \ M}`.
    pub fn mp_of(&self, m: &AtomSet) -> AtomSet {
        self.base.iter().map(|x| if m.contains(x) { *x } else { self.neg[x] }).collect()
    }

    /// `A ∩ at(P)`.
    pub fn decode_as(&self, a: &AtomSet) -> AtomSet {
        a.iter().filter(|x| self.neg.contains_key(x)).copied().collect()
    }

    /// `P'` of the correspondence for a candidate `M`:
    /// `⋃_{x∈M} (P_x^M ∪ {x_x.} ∪ (at(P) \ M)_x)`.
    pub fn p_prime(&self, source: &Program, m: &AtomSet) -> Program {
        let (proper, _) = split(source);
        let mut out = Program::new(self.program.table().clone());
        for &x in m {
            for rule in reduct(&proper, m).rules() {
                out.push(self.swap(rule, x));
            }
            out.push(Rule::fact(self.copy(CopyBase::Atom(x), x)));
            for &y in self.base.iter().filter(|y| !m.contains(y)) {
                out.push(Rule::fact(self.copy(CopyBase::Atom(y), x)));
            }
        }
        out
    }

    /// The `P_x` image of a proper rule.
    fn swap(&self, rule: &Rule, x: Atom) -> Rule {
        let head = if rule.pos.is_empty() {
            [self.copy(CopyBase::T, x)].into()
        } else {
            self.copy_set(&rule.pos, x)
        };
        Rule { head, pos: self.copy_set(&rule.head, x), neg: rule.neg.clone() }
    }
}

/// Interns `x̄` for every atom, then the copies owner by owner, `t` last.
fn layout(program: &Program, owners: &[Atom], with_neg: bool) -> NormalTranslation {
    let base: Vec<Atom> = program.atoms().into_iter().collect();
    let mut table: AtomTable = program.table().clone();
    let mut neg = BTreeMap::new();
    if with_neg {
        for &x in &base {
            let name = format!("__n_{}", table.name(x));
            neg.insert(x, table.fresh(&name));
        }
    }
    let mut copies = BTreeMap::new();
    for &x in owners {
        for &y in &base {
            let name = format!("__c_{}_{}", table.name(y), table.name(x));
            copies.insert((CopyBase::Atom(y), x), table.fresh(&name));
        }
        let name = format!("__c_t_{}", table.name(x));
        copies.insert((CopyBase::T, x), table.fresh(&name));
    }
    NormalTranslation { program: Program::new(table), base, neg, copies }
}

/// `P_x`, over a table extended with the copies owned by `x`.
pub fn build_px(program: &Program, x: Atom) -> Result<Program> {
    if !program.atoms().contains(&x) {
        let name = if x.index() < program.table().len() { program.name(x).to_owned() } else { format!("#{}", x.index()) };
        return Err(Error::UnknownAtom(name));
    }
    let tr = layout(program, &[x], false);
    let (proper, _) = split(program);
    let rules: Vec<Rule> = proper.rules().map(|r| tr.swap(r, x)).collect();
    Ok(Program::from_rules(tr.program.table().clone(), rules))
}

/// `P_trans = P_xor ∪ P_aux ∪ ⋃_x P_x ∪ P_mod ∪ P_true`, with its atom maps.
pub fn translation(program: &Program) -> NormalTranslation {
    let owners: Vec<Atom> = program.atoms().into_iter().collect();
    let mut tr = layout(program, &owners, true);
    let (proper, _) = split(program);
    let mut rules = Vec::new();
    for &x in &tr.base {
        let nx = tr.neg[&x];
        rules.push(Rule::new([x], [], [nx]));
        rules.push(Rule::new([nx], [], [x]));
    }
    for &x in &tr.base {
        let nx = tr.neg[&x];
        rules.push(Rule::new([tr.copy(CopyBase::Atom(x), x)], [], [nx]));
        for &y in &tr.base {
            rules.push(Rule::new([tr.copy(CopyBase::Atom(y), x)], [], [nx, y]));
        }
    }
    for &x in &tr.base {
        rules.extend(proper.rules().map(|r| tr.swap(r, x)));
    }
    for r in program.rules() {
        rules.push(Rule::constraint(r.pos.iter().copied(), r.neg.union(&r.head).copied()));
    }
    for &x in &tr.base {
        rules.push(Rule::constraint([x], [tr.copy(CopyBase::T, x)]));
    }
    for r in rules {
        tr.program.push(r);
    }
    debug_assert!(!program.rules().all(Rule::is_dual_normal) || tr.program.rules().all(Rule::is_normal));
    debug_assert!(!program.rules().all(Rule::is_normal) || tr.program.rules().all(Rule::is_dual_normal));
    tr
}

/// `P*`: [`translation`] plus `y_x ← t_x` for all `x, y ∈ at(P)`.
pub fn translation_star(program: &Program) -> NormalTranslation {
    let mut tr = translation(program);
    let extra: Vec<Rule> = tr
        .base
        .iter()
        .flat_map(|&x| tr.base.iter().map(move |&y| (x, y)))
        .map(|(x, y)| Rule::new([tr.copy(CopyBase::Atom(y), x)], [tr.copy(CopyBase::T, x)], []))
        .collect();
    for r in extra {
        tr.program.push(r);
    }
    tr
}

pub fn translate(program: &Program) -> Program {
    translation(program).program
}

pub fn translate_star(program: &Program) -> Program {
    translation_star(program).program
}

/// `M_P` as an interpretation of [`translate`]`(P)`.
pub fn mp_of(program: &Program, m: &AtomSet) -> Result<AtomSet> {
    let atoms = program.atoms();
    if !m.is_subset(&atoms) {
        return Err(Error::NotInUniverse);
    }
    Ok(translation(program).mp_of(m))
}

/// `A ∩ at(P)`.
pub fn decode_as(program: &Program, a: &AtomSet) -> AtomSet {
    let atoms = program.atoms();
    a.intersection(&atoms).copied().collect()
}

fn subsets(atoms: &[Atom]) -> impl Iterator<Item = AtomSet> + '_ {
    (0u64..1 << atoms.len())
        .map(move |bits| atoms.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &a)| a).collect())
}

/// Checks both directions of the `P_trans` correspondence for every
/// `M ⊆ at(P)`, and that every answer set of `P_trans` has the form
/// `M_P ∪ N` for a minimal model `N` of `P'`.
pub fn check_trans2(program: &Program, budget: OracleBudget) -> Result<bool> {
    let base: Vec<Atom> = program.atoms().into_iter().collect();
    budget.check(base.len())?;
    let expected = answer_sets_bf(program, budget)?;
    let tr = translation(program);
    let actual = answer_sets_search(&tr.program)?;
    let mut accounted = BTreeSet::new();
    for m in subsets(&base) {
        let mp = tr.mp_of(&m);
        let p_prime = tr.p_prime(program, &m);
        let minimal = minimal_models_search(&p_prime)?;
        let all = minimal.iter().all(|n| actual.contains(&mp.union(n).copied().collect()));
        if expected.contains(&m) != all {
            return Ok(false);
        }
        accounted.extend(minimal.iter().map(|n| mp.union(n).copied().collect::<AtomSet>()));
    }
    Ok(actual.is_subset(&accounted))
}

/// `M' = M_P ∪ ⋃_{x∈M} (at(P) ∪ {t})_x`.
pub fn star_image(tr: &NormalTranslation, m: &AtomSet) -> AtomSet {
    let mut out = tr.mp_of(m);
    for &x in m {
        out.extend(tr.copy_set(&tr.base.iter().copied().collect(), x));
        out.insert(tr.copy(CopyBase::T, x));
    }
    out
}

/// Checks that `M ↦ M'` is a bijection between `AS(P)` and `AS(P*)`.
pub fn check_trans3(program: &Program, budget: OracleBudget) -> Result<bool> {
    budget.check(program.atoms().len())?;
    let expected = answer_sets_bf(program, budget)?;
    let tr = translation_star(program);
    let actual = answer_sets_search(&tr.program)?;
    let images: BTreeSet<AtomSet> = expected.iter().map(|m| star_image(&tr, m)).collect();
    debug_assert!(images.iter().all(|a| is_model(a, &tr.program)));
    Ok(images == actual && actual.iter().all(|a| expected.contains(&tr.decode_as(a))))
}
