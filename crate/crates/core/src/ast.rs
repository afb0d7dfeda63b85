//! Ground disjunctive programs over interned atoms.
//!
//! A rule `a1 | ... | al :- b1, ..., bm, not c1, ..., not cn.` is stored as
//! three sorted atom sets. A [`Program`] owns the [`AtomTable`] its atoms
//! live in, so translations that introduce auxiliary atoms extend a copy of
//! the table and keep the original ids stable.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexSet;

use crate::error::{Error, Result};

/// Names starting with this prefix are reserved for generated atoms.
pub const RESERVED_PREFIX: &str = "__";

pub fn is_reserved(name: &str) -> bool {
    name.starts_with(RESERVED_PREFIX)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(u32);

impl Atom {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Self {
        Atom(index as u32)
    }
}

pub type AtomSet = BTreeSet<Atom>;

/// A set of atoms read as the atoms assigned true.
pub type Interpretation = AtomSet;

/// Bijection between atom names and ids; ids are handed out densely in
/// insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomTable {
    names: Vec<String>,
    ids: HashMap<String, Atom>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> Atom {
        if let Some(&atom) = self.ids.get(name) {
            return atom;
        }
        let atom = Atom(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), atom);
        atom
    }

    /// Adds a new atom named `base`, or `base_1`, `base_2`, ... if the name is
    /// taken. The result is always a fresh id.
    pub fn fresh(&mut self, base: &str) -> Atom {
        if !self.ids.contains_key(base) {
            return self.intern(base);
        }
        let mut k = 1usize;
        loop {
            let candidate = format!("{base}_{k}");
            if !self.ids.contains_key(&candidate) {
                return self.intern(&candidate);
            }
            k += 1;
        }
    }

    pub fn get(&self, name: &str) -> Option<Atom> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, atom: Atom) -> &str {
        &self.names[atom.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> {
        (0..self.names.len() as u32).map(Atom)
    }

    /// Names of `set` in name-lexicographic order.
    pub fn sorted_names<'a>(&'a self, set: &AtomSet) -> Vec<&'a str> {
        let mut names: Vec<&str> = set.iter().map(|&a| self.name(a)).collect();
        names.sort_unstable();
        names
    }

    /// Space-separated, name-sorted rendering of a set.
    pub fn format_set(&self, set: &AtomSet) -> String {
        self.sorted_names(set).join(" ")
    }

    /// Resolves names to atoms, failing on the first unknown one.
    pub fn lookup_all<'n>(&self, names: impl IntoIterator<Item = &'n str>) -> Result<AtomSet> {
        names
            .into_iter()
            .map(|n| self.get(n).ok_or_else(|| Error::UnknownAtom(n.to_owned())))
            .collect()
    }
}

/// `head :- pos, not neg.` with duplicate-free atom sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rule {
    pub head: AtomSet,
    pub pos: AtomSet,
    pub neg: AtomSet,
}

impl Rule {
    pub fn new(
        head: impl IntoIterator<Item = Atom>,
        pos: impl IntoIterator<Item = Atom>,
        neg: impl IntoIterator<Item = Atom>,
    ) -> Self {
        Rule {
            head: head.into_iter().collect(),
            pos: pos.into_iter().collect(),
            neg: neg.into_iter().collect(),
        }
    }

    pub fn fact(atom: Atom) -> Self {
        Rule::new([atom], [], [])
    }

    pub fn constraint(pos: impl IntoIterator<Item = Atom>, neg: impl IntoIterator<Item = Atom>) -> Self {
        Rule::new([], pos, neg)
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn is_normal(&self) -> bool {
        self.head.len() <= 1
    }

    pub fn is_definite(&self) -> bool {
        self.head.len() == 1
    }

    pub fn is_positive(&self) -> bool {
        self.neg.is_empty()
    }

    pub fn is_horn(&self) -> bool {
        self.is_normal() && self.is_positive()
    }

    pub fn is_dual_horn(&self) -> bool {
        self.pos.len() <= 1 && self.is_positive()
    }

    pub fn is_dual_normal(&self) -> bool {
        self.is_constraint() || self.pos.len() <= 1
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.head.iter().chain(&self.pos).chain(&self.neg).copied()
    }

    /// Number of atom occurrences plus one, so facts and the empty constraint
    /// still contribute to a program's size.
    pub fn size(&self) -> usize {
        1 + self.head.len() + self.pos.len() + self.neg.len()
    }

    pub fn display<'a>(&'a self, table: &'a AtomTable) -> RuleDisplay<'a> {
        RuleDisplay { rule: self, table }
    }
}

pub struct RuleDisplay<'a> {
    rule: &'a Rule,
    table: &'a AtomTable,
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.table;
        let head: Vec<&str> = self.rule.head.iter().map(|&a| t.name(a)).collect();
        let mut body: Vec<String> = self.rule.pos.iter().map(|&a| t.name(a).to_owned()).collect();
        body.extend(self.rule.neg.iter().map(|&a| format!("not {}", t.name(a))));
        match (head.is_empty(), body.is_empty()) {
            (false, true) => write!(f, "{}.", head.join(" | ")),
            (false, false) => write!(f, "{} :- {}.", head.join(" | "), body.join(", ")),
            (true, false) => write!(f, ":- {}.", body.join(", ")),
            (true, true) => write!(f, ":- ."),
        }
    }
}

/// `I ⊨ r` iff `(H ∪ B⁻) ∩ I ≠ ∅` or `B⁺ ⊄ I`.
pub fn satisfies(interp: &AtomSet, rule: &Rule) -> bool {
    rule.head.iter().chain(&rule.neg).any(|a| interp.contains(a))
        || rule.pos.iter().any(|a| !interp.contains(a))
}

/// A finite, duplicate-free, insertion-ordered set of rules.
#[derive(Clone, Debug, Default)]
pub struct Program {
    table: AtomTable,
    rules: IndexSet<Rule>,
}

impl PartialEq for Program {
    /// Same table and same rule set, regardless of rule order.
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
            && self.rules.len() == other.rules.len()
            && self.rules.iter().all(|r| other.rules.contains(r))
    }
}

impl Eq for Program {}

impl Program {
    pub fn new(table: AtomTable) -> Self {
        Program { table, rules: IndexSet::new() }
    }

    pub fn from_rules(table: AtomTable, rules: impl IntoIterator<Item = Rule>) -> Self {
        Program { table, rules: rules.into_iter().collect() }
    }

    /// Adds a rule; returns false if a structurally identical one exists.
    pub fn push(&mut self, rule: Rule) -> bool {
        self.rules.insert(rule)
    }

    pub fn rules(&self) -> impl ExactSizeIterator<Item = &Rule> + '_ {
        self.rules.iter()
    }

    pub fn contains(&self, rule: &Rule) -> bool {
        self.rules.contains(rule)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn table(&self) -> &AtomTable {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut AtomTable {
        &mut self.table
    }

    /// `at(P)`: atoms occurring in some rule.
    pub fn atoms(&self) -> AtomSet {
        self.rules.iter().flat_map(Rule::atoms).collect()
    }

    /// `‖P‖`, the sum of rule sizes.
    pub fn size(&self) -> usize {
        self.rules.iter().map(Rule::size).sum()
    }

    pub fn atom(&self, name: &str) -> Option<Atom> {
        self.table.get(name)
    }

    pub fn name(&self, atom: Atom) -> &str {
        self.table.name(atom)
    }

    /// A program with the same table and the rules selected by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Rule) -> bool) -> Program {
        Program {
            table: self.table.clone(),
            rules: self.rules.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }

    pub fn without(&self, rule: &Rule) -> Program {
        self.filter(|r| r != rule)
    }

    /// The same rules with atoms re-interned (by name) into `table`.
    pub fn reindex(&self, table: &mut AtomTable) -> Program {
        let mut map = |set: &AtomSet| -> AtomSet {
            set.iter().map(|&a| table.intern(self.table.name(a))).collect()
        };
        let rules: Vec<Rule> = self
            .rules
            .iter()
            .map(|r| Rule { head: map(&r.head), pos: map(&r.pos), neg: map(&r.neg) })
            .collect();
        Program::from_rules(table.clone(), rules)
    }

    /// Rule sets compared by atom names, ignoring ids and rule order.
    pub fn same_rules(&self, other: &Program) -> bool {
        self.named_rules() == other.named_rules()
    }

    fn named_rules(&self) -> BTreeSet<[BTreeSet<&str>; 3]> {
        let names = |s: &AtomSet| s.iter().map(|&a| self.table.name(a)).collect();
        self.rules.iter().map(|r| [names(&r.head), names(&r.pos), names(&r.neg)]).collect()
    }
}

/// Moves `p` and `q` into one joint table so their atoms are comparable.
/// `p`'s ids are kept; `q`'s atoms are re-interned by name.
pub fn align(p: &Program, q: &Program) -> (Program, Program) {
    let mut table = p.table().clone();
    let q = q.reindex(&mut table);
    let p = Program::from_rules(table.clone(), p.rules().cloned());
    let q = Program::from_rules(table, q.rules().cloned());
    (p, q)
}

/// `I ⊨ P`; the empty program is satisfied by everything.
pub fn is_model(interp: &AtomSet, program: &Program) -> bool {
    program.rules().all(|r| satisfies(interp, r))
}

/// Gelfond–Lifschitz reduct `P^I = {H ← B⁺ | r ∈ P, I ∩ B⁻ = ∅}`.
pub fn reduct(program: &Program, interp: &AtomSet) -> Program {
    let rules = program
        .rules()
        .filter(|r| r.neg.is_disjoint(interp))
        .map(|r| Rule { head: r.head.clone(), pos: r.pos.clone(), neg: AtomSet::new() });
    Program::from_rules(program.table().clone(), rules)
}

/// `P[t]`: every rule with an empty positive body gets `t` as its positive body.
///
/// `t` must be an id of `program`'s table, carry the reserved prefix, and not
/// occur in the program.
pub fn p_t_transform(program: &Program, t: Atom) -> Result<Program> {
    if t.index() >= program.table().len() {
        return Err(Error::Precondition(format!("atom #{} is not in the program's table", t.index())));
    }
    let name = program.name(t);
    if !is_reserved(name) {
        return Err(Error::Precondition(format!("fresh atom `{name}` must use the reserved prefix")));
    }
    if program.rules().any(|r| r.atoms().any(|a| a == t)) {
        return Err(Error::AtomInProgram(name.to_owned()));
    }
    let rules = program.rules().map(|r| {
        if r.pos.is_empty() {
            Rule { head: r.head.clone(), pos: [t].into(), neg: r.neg.clone() }
        } else {
            r.clone()
        }
    });
    Ok(Program::from_rules(program.table().clone(), rules))
}

/// Adds a fresh atom named after `base` and applies [`p_t_transform`].
pub fn p_t_transform_fresh(program: &Program, base: &str) -> Result<(Program, Atom)> {
    let mut extended = program.clone();
    let t = extended.table_mut().fresh(base);
    Ok((p_t_transform(&extended, t)?, t))
}

/// Partition into proper rules `P_r` and constraints `P_c`, order preserved.
pub fn split(program: &Program) -> (Program, Program) {
    (program.filter(|r| !r.is_constraint()), program.filter(Rule::is_constraint))
}
