//! Maximal models of dual-Horn programs by elimination, and the resulting
//! polynomial answer-set check for dual-normal programs.

use std::collections::BTreeSet;

use crate::ast::{is_model, p_t_transform_fresh, reduct, split, Atom, AtomSet, AtomTable, Program, Rule};
use crate::error::{Error, Result};
use crate::oracle::{Masked, OracleBudget};

/// The chain `E₀ ⊆ E₁ ⊆ … ⊆ E_k` of atoms excluded from every model of
/// `P[t]`, over `at(P) ∪ {t}` (plus any extra universe atoms).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationTrace {
    pub levels: Vec<AtomSet>,
    pub max_model: AtomSet,
    pub t: Atom,
    pub t_eliminated: bool,
    /// The program's table extended with `t`.
    pub table: AtomTable,
}

impl EliminationTrace {
    pub fn fixpoint(&self) -> &AtomSet {
        self.levels.last().expect("E₀ is always present")
    }

    /// The maximal model of the original program, or `None` if it has no model.
    pub fn program_max_model(&self) -> Option<AtomSet> {
        if self.t_eliminated {
            None
        } else {
            let mut m = self.max_model.clone();
            m.remove(&self.t);
            Some(m)
        }
    }
}

pub fn elimination_fixpoint(program: &Program) -> Result<EliminationTrace> {
    elimination_fixpoint_with(program, "__t", &AtomSet::new())
}

/// Like [`elimination_fixpoint`] with a chosen base name for `t` and extra
/// universe atoms that occur in no rule.
pub fn elimination_fixpoint_with(program: &Program, t_base: &str, extra: &AtomSet) -> Result<EliminationTrace> {
    if !program.rules().all(Rule::is_dual_horn) {
        return Err(Error::NotDualHorn);
    }
    let (pt, t) = p_t_transform_fresh(program, t_base)?;
    let mut universe = program.atoms();
    universe.extend(extra.iter().copied());
    universe.insert(t);

    let n = pt.table().len();
    let rules: Vec<&Rule> = pt.rules().collect();
    let body: Vec<Atom> = rules.iter().map(|r| *r.pos.first().expect("P[t] has no empty positive body")).collect();
    let mut remaining: Vec<usize> = rules.iter().map(|r| r.head.len()).collect();
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ri, r) in rules.iter().enumerate() {
        for h in &r.head {
            watchers[h.index()].push(ri);
        }
    }

    let mut eliminated = vec![false; n];
    let mut current = AtomSet::new();
    let mut levels = vec![current.clone()];
    let mut frontier: Vec<Atom> = (0..rules.len()).filter(|&ri| remaining[ri] == 0).map(|ri| body[ri]).collect();
    loop {
        let fresh: BTreeSet<Atom> = frontier.drain(..).filter(|a| !eliminated[a.index()]).collect();
        if fresh.is_empty() {
            break;
        }
        for &a in &fresh {
            eliminated[a.index()] = true;
            current.insert(a);
        }
        levels.push(current.clone());
        for &a in &fresh {
            for &ri in &watchers[a.index()] {
                remaining[ri] -= 1;
                if remaining[ri] == 0 {
                    frontier.push(body[ri]);
                }
            }
        }
    }

    let max_model = universe.difference(&current).copied().collect();
    Ok(EliminationTrace { t_eliminated: eliminated[t.index()], levels, max_model, t, table: pt.table().clone() })
}

/// The unique `⊆`-maximal model of a dual-Horn program over `at(P)`, or
/// `None` if it has no model.
pub fn max_model_dual_horn(program: &Program) -> Result<Option<AtomSet>> {
    max_model_dual_horn_over(program, &AtomSet::new())
}

pub fn max_model_dual_horn_over(program: &Program, extra: &AtomSet) -> Result<Option<AtomSet>> {
    Ok(elimination_fixpoint_with(program, "__t", extra)?.program_max_model())
}

/// `P^{M,m} = P_r^M ∪ {⊥ ← b | b ∈ at(P) \ M} ∪ {⊥ ← m}`.
pub fn pmm(program: &Program, interp: &AtomSet, m: Atom) -> Result<Program> {
    if !interp.contains(&m) {
        let name = if m.index() < program.table().len() { program.name(m).to_owned() } else { format!("#{}", m.index()) };
        return Err(Error::NotInInterpretation(name));
    }
    let atoms = program.atoms();
    if !interp.is_subset(&atoms) {
        return Err(Error::NotInUniverse);
    }
    let (proper, _) = split(program);
    let mut out = reduct(&proper, interp);
    for &b in atoms.difference(interp) {
        out.push(Rule::constraint([b], []));
    }
    out.push(Rule::constraint([m], []));
    debug_assert!(
        !program.rules().all(Rule::is_dual_normal) || out.rules().all(Rule::is_dual_horn),
        "P^(M,m) of a dual-normal program is dual-Horn"
    );
    Ok(out)
}

fn require_dual_normal(program: &Program) -> Result<()> {
    if program.rules().all(Rule::is_dual_normal) {
        Ok(())
    } else {
        Err(Error::NotDualNormal)
    }
}

/// `M ⊨ P` and the elimination chain of every `P^{M,m}` reaches `t`.
pub fn is_answer_set_dn(program: &Program, interp: &AtomSet) -> Result<bool> {
    require_dual_normal(program)?;
    if !interp.is_subset(&program.atoms()) {
        return Err(Error::NotInUniverse);
    }
    Ok(is_model(interp, program) && minimal_at_every_atom(program, interp)?)
}

fn minimal_at_every_atom(program: &Program, interp: &AtomSet) -> Result<bool> {
    for &m in interp {
        let check = pmm(program, interp, m)?;
        let t_base = format!("__t_{}", program.name(m));
        if !elimination_fixpoint_with(&check, &t_base, &AtomSet::new())?.t_eliminated {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All answer sets of a dual-normal program: candidate models by subset
/// enumeration, each confirmed by [`is_answer_set_dn`].
pub fn answer_sets_dn(program: &Program, budget: OracleBudget) -> Result<BTreeSet<AtomSet>> {
    require_dual_normal(program)?;
    let universe = program.atoms();
    budget.check(universe.len())?;
    let masked = Masked::new(program, &universe);
    let mut out = BTreeSet::new();
    for i in masked.models() {
        let m = masked.set(i);
        if minimal_at_every_atom(program, &m)? {
            out.insert(m);
        }
    }
    Ok(out)
}
