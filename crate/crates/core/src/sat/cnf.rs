use std::collections::HashMap;

use crate::ast::AtomTable;

use super::formula::{Formula, Var};

/// A CNF over variables `1..=num_vars`. Variables that stand for encoding
/// variables carry a [`Var`] and, once named, a printable label; Tseitin
/// auxiliaries carry neither.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfInstance {
    num_vars: u32,
    clauses: Vec<Vec<i32>>,
    vars: Vec<Option<Var>>,
    labels: Vec<Option<String>>,
}

impl CnfInstance {
    pub fn new(num_vars: u32, clauses: Vec<Vec<i32>>) -> Self {
        CnfInstance { num_vars, clauses, vars: Vec::new(), labels: Vec::new() }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn label(&self, index: u32) -> Option<&str> {
        self.labels.get(index as usize).and_then(|l| l.as_deref())
    }

    /// The encoding variable behind DIMACS variable `index`, if any.
    pub fn var(&self, index: u32) -> Option<Var> {
        self.vars.get(index as usize).copied().flatten()
    }

    pub fn index_of(&self, var: Var) -> Option<u32> {
        self.vars.iter().position(|v| *v == Some(var)).map(|i| i as u32)
    }

    /// Attaches `c i = name` labels to every encoding variable.
    pub fn with_labels(mut self, table: &AtomTable) -> Self {
        self.labels = self.vars.iter().map(|v| v.map(|v| v.display(table).to_string())).collect();
        self
    }

    pub fn add_clause(&mut self, clause: Vec<i32>) {
        debug_assert!(clause.iter().all(|l| *l != 0 && l.unsigned_abs() <= self.num_vars));
        self.clauses.push(clause);
    }
}

/// Tseitin translation with encoding variables numbered by their natural
/// order. See [`tseitin_cnf_with_layout`].
pub fn tseitin_cnf(formula: &Formula) -> CnfInstance {
    let layout: Vec<Var> = formula.vars().into_iter().collect();
    tseitin_cnf_with_layout(formula, &layout)
}

/// Tseitin translation where `layout[k]` becomes DIMACS variable `k + 1`.
/// Variables of the formula missing from the layout follow it in order, and
/// auxiliaries come last.
///
/// Every auxiliary is defined by a full biconditional, so the models of the
/// CNF projected onto the layout are exactly the models of the formula.
/// Top-level conjuncts that already are clauses are emitted as they are.
pub fn tseitin_cnf_with_layout(formula: &Formula, layout: &[Var]) -> CnfInstance {
    let mut vars: Vec<Option<Var>> = vec![None];
    let mut index: HashMap<Var, i32> = HashMap::new();
    let mut place = |v: Var, vars: &mut Vec<Option<Var>>| {
        index.entry(v).or_insert_with(|| {
            vars.push(Some(v));
            (vars.len() - 1) as i32
        });
    };
    for &v in layout {
        place(v, &mut vars);
    }
    for v in formula.vars() {
        place(v, &mut vars);
    }
    let mut builder = Builder { index, next: vars.len() as i32, clauses: Vec::new(), truth: None };
    builder.top(&[], formula);
    let num_vars = (builder.next - 1) as u32;
    vars.resize(num_vars as usize + 1, None);
    CnfInstance { num_vars, clauses: builder.clauses, vars, labels: Vec::new() }
}

struct Builder {
    index: HashMap<Var, i32>,
    next: i32,
    clauses: Vec<Vec<i32>>,
    truth: Option<i32>,
}

impl Builder {
    fn fresh(&mut self) -> i32 {
        let v = self.next;
        self.next += 1;
        v
    }

    fn constant(&mut self, value: bool) -> i32 {
        let t = match self.truth {
            Some(t) => t,
            None => {
                let t = self.fresh();
                self.clauses.push(vec![t]);
                self.truth = Some(t);
                t
            }
        };
        if value {
            t
        } else {
            -t
        }
    }

    fn literal(&self, f: &Formula) -> Option<i32> {
        match f {
            Formula::Var(v) => Some(self.index[v]),
            Formula::Not(g) => self.literal(g).map(|l| -l),
            _ => None,
        }
    }

    fn clause(&self, f: &Formula, out: &mut Vec<i32>) -> bool {
        match f {
            Formula::Or(fs) => fs.iter().all(|g| self.clause(g, out)),
            Formula::Implies(a, b) => match self.literal(a) {
                Some(l) => {
                    out.push(-l);
                    self.clause(b, out)
                }
                None => false,
            },
            Formula::Const(false) => true,
            f => match self.literal(f) {
                Some(l) => {
                    out.push(l);
                    true
                }
                None => false,
            },
        }
    }

    /// Emits clauses for `guard ∨ f`, where `guard` is a disjunction of
    /// literals. Conjunctions and implications from a literal are unfolded
    /// into guarded clauses; anything else gets a definition variable.
    fn top(&mut self, guard: &[i32], f: &Formula) {
        let with = |guard: &[i32], lits: &[i32]| -> Vec<i32> { guard.iter().chain(lits).copied().collect() };
        match f {
            Formula::Const(true) => return,
            Formula::Const(false) => {
                self.clauses.push(guard.to_vec());
                return;
            }
            Formula::And(fs) => {
                for g in fs {
                    self.top(guard, g);
                }
                return;
            }
            Formula::Implies(a, b) => {
                if let Some(x) = self.literal(a) {
                    self.top(&with(guard, &[-x]), b);
                    return;
                }
            }
            Formula::Iff(a, b) => {
                let x = match self.literal(a) {
                    Some(x) => x,
                    None => self.encode(a),
                };
                let y = match self.literal(b) {
                    Some(y) => y,
                    None => self.encode(b),
                };
                self.clauses.push(with(guard, &[-x, y]));
                self.clauses.push(with(guard, &[x, -y]));
                return;
            }
            _ => {}
        }
        let mut lits = Vec::new();
        if self.clause(f, &mut lits) {
            self.clauses.push(with(guard, &lits));
            return;
        }
        let root = self.encode(f);
        self.clauses.push(with(guard, &[root]));
    }

    fn encode(&mut self, f: &Formula) -> i32 {
        match f {
            Formula::Const(b) => self.constant(*b),
            Formula::Var(v) => self.index[v],
            Formula::Not(g) => -self.encode(g),
            Formula::And(fs) => {
                let lits: Vec<i32> = fs.iter().map(|g| self.encode(g)).collect();
                self.define_and(&lits)
            }
            Formula::Or(fs) => {
                let lits: Vec<i32> = fs.iter().map(|g| -self.encode(g)).collect();
                -self.define_and(&lits)
            }
            Formula::Implies(a, b) => {
                let lits = [self.encode(a), -self.encode(b)];
                -self.define_and(&lits)
            }
            Formula::Iff(a, b) => {
                let (x, y) = (self.encode(a), self.encode(b));
                let d = self.fresh();
                self.clauses.push(vec![-d, -x, y]);
                self.clauses.push(vec![-d, x, -y]);
                self.clauses.push(vec![d, x, y]);
                self.clauses.push(vec![d, -x, -y]);
                d
            }
        }
    }

    /// Fresh `d` with `d ↔ ⋀ lits`.
    fn define_and(&mut self, lits: &[i32]) -> i32 {
        let d = self.fresh();
        let mut long = vec![d];
        for &l in lits {
            self.clauses.push(vec![-d, l]);
            long.push(-l);
        }
        self.clauses.push(long);
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Atom;
    use crate::sat::solver::enumerate_models;
    use crate::sat::SolverLimits;
    use std::collections::BTreeSet;

    fn v(i: u32) -> Formula {
        Formula::base(Atom::from_index(i as usize))
    }

    fn projected_models(cnf: &CnfInstance, k: u32) -> BTreeSet<Vec<bool>> {
        let project: Vec<u32> = (1..=k).collect();
        enumerate_models(cnf, &project, SolverLimits::default())
            .unwrap()
            .into_iter()
            .map(|m| project.iter().map(|&i| m[i as usize]).collect())
            .collect()
    }

    fn truth_table(f: &Formula, k: u32) -> BTreeSet<Vec<bool>> {
        (0u32..1 << k)
            .map(|bits| (0..k).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
            .filter(|row| {
                f.eval(&|var| match var {
                    Var::Base(a) => row[a.index()],
                    _ => unreachable!(),
                })
            })
            .collect()
    }

    #[test]
    fn projection_matches_truth_table() {
        let f = Formula::and([
            Formula::iff(v(0), Formula::and([v(1), Formula::or([v(2), Formula::not(v(0))])])),
            Formula::implies(v(2), Formula::or([v(1), v(3)])),
            Formula::or([Formula::and([v(0), v(3)]), Formula::not(v(1))]),
        ]);
        let layout: Vec<Var> = (0..4).map(|i| Var::Base(Atom::from_index(i))).collect();
        let cnf = tseitin_cnf_with_layout(&f, &layout);
        assert_eq!(projected_models(&cnf, 4), truth_table(&f, 4));
    }

    #[test]
    fn clause_conjuncts_are_copied() {
        let f = Formula::and([Formula::or([v(0), Formula::not(v(1))]), Formula::iff(v(0), v(1))]);
        let cnf = tseitin_cnf(&f);
        assert_eq!(cnf.num_vars(), 2);
        assert_eq!(cnf.clauses(), &[vec![1, -2], vec![-1, 2], vec![1, -2]]);
    }

    #[test]
    fn constants() {
        let cnf = tseitin_cnf(&Formula::Const(false));
        assert!(projected_models(&cnf, 0).is_empty());
        let cnf = tseitin_cnf(&Formula::Const(true));
        assert_eq!(projected_models(&cnf, 0).len(), 1);
    }
}
