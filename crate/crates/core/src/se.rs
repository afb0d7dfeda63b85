//! SE- and UE-models, structural properties of SE-sets, and synthesis of
//! dual-normal programs from SE- and UE-sets.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::ast::{align, is_model, reduct, split, Atom, AtomSet, AtomTable, Program, Rule};
use crate::dual_horn::max_model_dual_horn_over;
use crate::error::{Error, Result};
use crate::oracle::{proper_submasks, Masked, OracleBudget};

/// An SE-interpretation `(X, Y)` with `X ⊆ Y`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SEPair {
    pub here: AtomSet,
    pub there: AtomSet,
}

impl SEPair {
    pub fn new(here: AtomSet, there: AtomSet) -> Self {
        debug_assert!(here.is_subset(&there));
        SEPair { here, there }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SESet {
    pub universe: AtomSet,
    pub pairs: BTreeSet<SEPair>,
}

impl SESet {
    pub fn new(universe: AtomSet) -> Self {
        SESet { universe, pairs: BTreeSet::new() }
    }

    pub fn from_pairs(universe: AtomSet, pairs: impl IntoIterator<Item = SEPair>) -> Self {
        let mut s = SESet::new(universe);
        s.pairs.extend(pairs);
        s.universe = s.atoms();
        s
    }

    pub fn contains(&self, here: &AtomSet, there: &AtomSet) -> bool {
        self.pairs.contains(&SEPair { here: here.clone(), there: there.clone() })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The universe together with every atom occurring in a pair.
    pub fn atoms(&self) -> AtomSet {
        let mut all = self.universe.clone();
        for p in &self.pairs {
            all.extend(p.there.iter().copied());
        }
        all
    }

    /// Here-components grouped by their there-component.
    pub fn by_there(&self) -> BTreeMap<&AtomSet, BTreeSet<&AtomSet>> {
        let mut groups: BTreeMap<&AtomSet, BTreeSet<&AtomSet>> = BTreeMap::new();
        for p in &self.pairs {
            groups.entry(&p.there).or_default().insert(&p.here);
        }
        groups
    }

    fn totals(&self) -> BTreeSet<&AtomSet> {
        self.pairs.iter().filter(|p| p.here == p.there).map(|p| &p.there).collect()
    }
}

/// Rule satisfaction by an SE-interpretation via its four syntactic cases.
pub fn se_satisfies(pair: &SEPair, rule: &Rule) -> bool {
    let (x, y) = (&pair.here, &pair.there);
    !rule.neg.is_disjoint(y)
        || !rule.pos.is_subset(y)
        || !rule.head.is_disjoint(x)
        || (!rule.head.is_disjoint(y) && !rule.pos.is_subset(x))
}

pub fn se_models(program: &Program, budget: OracleBudget) -> Result<SESet> {
    se_models_over(program, &program.atoms(), budget)
}

/// `{(X, Y) | Y ⊆ U, Y ⊨ P, X ⊨ P^Y}` for a universe `U ⊇ at(P)`.
pub fn se_models_over(program: &Program, universe: &AtomSet, budget: OracleBudget) -> Result<SESet> {
    budget.check(universe.len())?;
    let m = Masked::new(program, universe);
    let mut out = SESet::new(universe.clone());
    for y in m.models() {
        let there = m.set(y);
        for x in std::iter::once(y).chain(proper_submasks(y)) {
            if m.reduct_model(x, y) {
                out.pairs.insert(SEPair { here: m.set(x), there: there.clone() });
            }
        }
    }
    if cfg!(debug_assertions) && universe.len() <= 5 {
        for y in 0..=m.full() {
            for x in std::iter::once(y).chain(proper_submasks(y)) {
                let pair = SEPair { here: m.set(x), there: m.set(y) };
                let by_lemma = program.rules().all(|r| se_satisfies(&pair, r));
                debug_assert_eq!(by_lemma, out.pairs.contains(&pair), "SE-model characterization disagrees");
            }
        }
    }
    Ok(out)
}

/// SE-models `(X, Y)` with no SE-model `(X', Y)`, `X ⊂ X' ⊂ Y`.
pub fn ue_models(set: &SESet) -> SESet {
    let groups = set.by_there();
    let pairs = set.pairs.iter().filter(|p| {
        groups[&p.there].iter().all(|&x2| !(p.here.is_subset(x2) && p.here != *x2) || x2 == &p.there)
    });
    SESet { universe: set.universe.clone(), pairs: pairs.cloned().collect() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SEProperties {
    pub complete: bool,
    pub closed_here_intersection: bool,
    pub closed_here_union: bool,
    pub ue_complete: bool,
    pub splittable: bool,
}

pub fn se_properties(set: &SESet) -> SEProperties {
    let props = SEProperties {
        complete: is_complete(set),
        closed_here_intersection: closed_under(set, |a, b| a.intersection(b).copied().collect()),
        closed_here_union: closed_under(set, |a, b| a.union(b).copied().collect()),
        ue_complete: is_ue_complete(set),
        splittable: is_splittable(set),
    };
    debug_assert!(!(props.ue_complete && props.splittable) || props.closed_here_union);
    props
}

fn totals_hold(set: &SESet) -> bool {
    set.pairs.iter().all(|p| set.contains(&p.there, &p.there))
}

fn is_complete(set: &SESet) -> bool {
    let totals = set.totals();
    totals_hold(set)
        && set.pairs.iter().all(|p| {
            totals.iter().filter(|z| p.there.is_subset(z)).all(|z| set.contains(&p.here, z))
        })
}

fn closed_under(set: &SESet, op: impl Fn(&AtomSet, &AtomSet) -> AtomSet) -> bool {
    set.by_there().into_iter().all(|(y, heres)| {
        heres.iter().all(|a| heres.iter().all(|b| set.contains(&op(a, b), y)))
    })
}

fn is_ue_complete(set: &SESet) -> bool {
    let totals = set.totals();
    let groups = set.by_there();
    let lifts = set.pairs.iter().all(|p| {
        totals.iter().filter(|&&z| p.there.is_subset(z) && p.there != *z).all(|&z| {
            groups[z].iter().any(|&y2| p.there.is_subset(y2) && y2 != z)
        })
    });
    let antichain = groups.iter().all(|(&y, heres)| {
        heres.iter().all(|a| heres.iter().all(|b| !(a.is_subset(b) && a != b) || *b == y))
    });
    totals_hold(set) && lifts && antichain
}

/// Closure of a family under binary union (which yields all non-empty
/// finite unions).
pub fn union_closure(family: &BTreeSet<AtomSet>) -> BTreeSet<AtomSet> {
    let mut closed = family.clone();
    let mut frontier: Vec<AtomSet> = family.iter().cloned().collect();
    while let Some(a) = frontier.pop() {
        let fresh: Vec<AtomSet> =
            closed.iter().map(|b| a.union(b).copied().collect::<AtomSet>()).filter(|u| !closed.contains(u)).collect();
        for u in fresh {
            if closed.insert(u.clone()) {
                frontier.push(u);
            }
        }
    }
    closed
}

fn heres_below(set: &SESet, z: &AtomSet) -> BTreeSet<AtomSet> {
    set.pairs.iter().filter(|p| p.there.is_subset(z)).map(|p| p.here.clone()).collect()
}

fn is_splittable(set: &SESet) -> bool {
    let groups = set.by_there();
    set.totals().into_iter().all(|z| {
        union_closure(&heres_below(set, z)).iter().all(|u| {
            set.contains(u, z) || groups[z].iter().any(|z2| u.is_subset(z2) && *z2 != z)
        })
    })
}

/// For every `(Z, Z)`: pairs `(X, Z)` with `X` a union of here-components
/// of pairs whose there-component lies below `Z`.
pub fn se_closure(set: &SESet) -> SESet {
    let mut out = SESet::new(set.universe.clone());
    for z in set.totals() {
        for x in union_closure(&heres_below(set, z)) {
            out.pairs.insert(SEPair { here: x, there: z.clone() });
        }
    }
    out
}

fn subsets(universe: &[Atom]) -> impl Iterator<Item = AtomSet> + '_ {
    (0u64..1 << universe.len()).map(move |bits| {
        universe.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &a)| a).collect()
    })
}

fn pick(set: impl IntoIterator<Item = Atom>) -> Atom {
    set.into_iter().min().expect("witness exists under the preconditions")
}

fn diff(a: &AtomSet, b: &AtomSet) -> AtomSet {
    a.difference(b).copied().collect()
}

/// A dual-normal program whose SE-models over the set's universe are exactly
/// the given set. Every witness is the smallest candidate atom id.
pub fn program_from_se_set(set: &SESet, table: &AtomTable) -> Result<Program> {
    let props = se_properties(set);
    if !props.complete || !props.closed_here_union {
        return Err(Error::Precondition("the SE-set must be complete and closed under here-union".into()));
    }
    let universe: Vec<Atom> = set.atoms().into_iter().collect();
    let theres: BTreeSet<&AtomSet> = set.pairs.iter().map(|p| &p.there).collect();
    let groups = set.by_there();
    let mut rules = Vec::new();
    for y_hat in subsets(&universe) {
        if !theres.contains(&y_hat) {
            let mut b = AtomSet::new();
            let mut c = AtomSet::new();
            for &y in &theres {
                if y.is_subset(&y_hat) {
                    b.insert(pick(diff(&y_hat, y)));
                } else {
                    c.insert(pick(diff(y, &y_hat)));
                }
            }
            rules.push(Rule::constraint(b, c));
            continue;
        }
        let heres = &groups[&y_hat];
        let c: AtomSet =
            theres.iter().filter(|y| **y != &y_hat && !y.is_subset(&y_hat)).map(|y| pick(diff(y, &y_hat))).collect();
        for x_hat in subsets(&y_hat.iter().copied().collect::<Vec<_>>()) {
            if heres.contains(&x_hat) {
                continue;
            }
            let below: Vec<&&AtomSet> = heres.iter().filter(|x| x.is_subset(&x_hat)).collect();
            let b: AtomSet = if below.is_empty() {
                AtomSet::new()
            } else {
                let x0: AtomSet = below.iter().flat_map(|x| x.iter().copied()).collect();
                [pick(diff(&x_hat, &x0))].into()
            };
            let above: Vec<&&AtomSet> = heres.iter().filter(|x| !x.is_subset(&x_hat)).collect();
            let a: AtomSet = if above.is_empty() {
                [pick(diff(&y_hat, &x_hat))].into()
            } else {
                above.iter().map(|x| pick(diff(x, &x_hat))).collect()
            };
            rules.push(Rule::new(a, b, c.iter().copied()));
        }
    }
    let program = Program::from_rules(table.clone(), rules);
    debug_assert!(program.rules().all(Rule::is_dual_normal));
    Ok(program)
}

/// A dual-normal program with exactly the given UE-models, built from the
/// SE-closure of the set.
pub fn program_from_ue_set(set: &SESet, table: &AtomTable) -> Result<Program> {
    let props = se_properties(set);
    if !props.ue_complete || !props.splittable {
        return Err(Error::Precondition("the UE-set must be UE-complete and splittable".into()));
    }
    program_from_se_set(&se_closure(set), table)
}

fn require_dual_normal(program: &Program) -> Result<()> {
    if program.rules().all(Rule::is_dual_normal) {
        Ok(())
    } else {
        Err(Error::NotDualNormal)
    }
}

/// Polynomial UE-model test for a dual-normal program over `at(P) ∪ Y`.
pub fn is_ue_model_dn(program: &Program, pair: &SEPair) -> Result<bool> {
    require_dual_normal(program)?;
    let mut universe = program.atoms();
    universe.extend(pair.there.iter().copied());
    Ok(ue_check(program, pair, &universe))
}

/// Whether `(X, Y)` is a UE-model over `universe`.
///
/// For each `y ∈ Y \ X` the SE-models `(X', Y)` with `X ⊆ X' ⊆ Y \ {y}` are
/// the models of the dual-Horn theory `P_r^Y ∪ X ∪ {⊥ ← z | z ∉ Y} ∪ {⊥ ← y}`.
/// Constraints of `P^Y` are left out: as `Y ⊨ P`, each has a positive body
/// outside `Y` and holds in every subset of `Y`.
fn ue_check(program: &Program, pair: &SEPair, universe: &AtomSet) -> bool {
    let (x, y) = (&pair.here, &pair.there);
    if !x.is_subset(y) || !is_model(y, program) {
        return false;
    }
    if x == y {
        return true;
    }
    let (proper, _) = split(program);
    let base = reduct(&proper, y);
    if !is_model(x, &base) {
        return false;
    }
    for &missing in y.difference(x) {
        let mut theory = base.clone();
        for &a in x {
            theory.push(Rule::fact(a));
        }
        for &z in universe.difference(y) {
            theory.push(Rule::constraint([z], []));
        }
        theory.push(Rule::constraint([missing], []));
        match max_model_dual_horn_over(&theory, universe) {
            Ok(Some(m)) if m == *x => {}
            _ => return false,
        }
    }
    true
}

/// Some SE-interpretation over the joint universe that is a UE-model of
/// exactly one program, found with the polynomial per-pair test. Atom ids
/// refer to the table of `align(p, q).0`.
pub fn uniform_equivalence_witness_dn(p: &Program, q: &Program, budget: OracleBudget) -> Result<Option<SEPair>> {
    require_dual_normal(p)?;
    require_dual_normal(q)?;
    let (p, q) = align(p, q);
    let universe: AtomSet = p.atoms().union(&q.atoms()).copied().collect();
    budget.check(universe.len())?;
    let atoms: Vec<Atom> = universe.iter().copied().collect();
    for y in subsets(&atoms) {
        let ys: Vec<Atom> = y.iter().copied().collect();
        for x in subsets(&ys) {
            let pair = SEPair { here: x, there: y.clone() };
            if ue_check(&p, &pair, &universe) != ue_check(&q, &pair, &universe) {
                return Ok(Some(pair));
            }
        }
    }
    Ok(None)
}

pub fn uniformly_equivalent_dn(p: &Program, q: &Program, budget: OracleBudget) -> Result<bool> {
    Ok(uniform_equivalence_witness_dn(p, q, budget)?.is_none())
}
