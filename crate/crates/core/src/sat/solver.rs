//! Small CDCL solver: two watched literals, first-UIP learning with
//! non-chronological backjumping, and blocking clauses for enumeration.

use crate::error::{Error, Result};

use super::cnf::CnfInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverLimits {
    pub max_models: usize,
    pub max_conflicts: u64,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits { max_models: 1 << 16, max_conflicts: 10_000_000 }
    }
}

/// Literal code: `2 * var + sign`, variables 0-based.
type Lit = u32;

fn lit_of(dimacs: i32) -> Lit {
    let v = dimacs.unsigned_abs() - 1;
    2 * v + (dimacs < 0) as u32
}

fn var_of(l: Lit) -> usize {
    (l >> 1) as usize
}

fn neg(l: Lit) -> Lit {
    l ^ 1
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Value {
    True,
    False,
    Unset,
}

struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<Option<bool>>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    unsat: bool,
    conflicts: u64,
    seen: Vec<bool>,
}

enum Outcome {
    Sat,
    Unsat,
}

impl Solver {
    fn new(num_vars: usize) -> Self {
        Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            assign: vec![None; num_vars],
            level: vec![0; num_vars],
            reason: vec![None; num_vars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            unsat: false,
            conflicts: 0,
            seen: vec![false; num_vars],
        }
    }

    fn value(&self, l: Lit) -> Value {
        match self.assign[var_of(l)] {
            None => Value::Unset,
            Some(b) => {
                if b != (l & 1 == 1) {
                    Value::True
                } else {
                    Value::False
                }
            }
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = var_of(l);
        self.assign[v] = Some(l & 1 == 0);
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause at decision level 0.
    fn add_clause(&mut self, lits: &[i32]) {
        debug_assert_eq!(self.decision_level(), 0);
        if self.unsat {
            return;
        }
        let mut clause: Vec<Lit> = Vec::with_capacity(lits.len());
        for &d in lits {
            let l = lit_of(d);
            match self.value(l) {
                Value::True => return,
                Value::False => continue,
                Value::Unset => {}
            }
            if clause.contains(&neg(l)) {
                return;
            }
            if !clause.contains(&l) {
                clause.push(l);
            }
        }
        match clause.len() {
            0 => self.unsat = true,
            1 => self.enqueue(clause[0], None),
            _ => {
                self.attach(clause);
            }
        }
    }

    fn attach(&mut self, clause: Vec<Lit>) -> usize {
        let ci = self.clauses.len();
        self.watches[clause[0] as usize].push(ci);
        self.watches[clause[1] as usize].push(ci);
        self.clauses.push(clause);
        ci
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = neg(p);
            let ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut kept = Vec::with_capacity(ws.len());
            let mut conflict = None;
            let mut i = 0;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                if self.clauses[ci][0] == false_lit {
                    self.clauses[ci].swap(0, 1);
                }
                let first = self.clauses[ci][0];
                if self.value(first) == Value::True {
                    kept.push(ci);
                    continue;
                }
                let len = self.clauses[ci].len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[ci][k];
                    if self.value(l) != Value::False {
                        self.clauses[ci].swap(1, k);
                        self.watches[l as usize].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                kept.push(ci);
                if self.value(first) == Value::False {
                    conflict = Some(ci);
                    kept.extend_from_slice(&ws[i..]);
                    break;
                }
                self.enqueue(first, Some(ci));
            }
            self.watches[false_lit as usize] = kept;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// First-UIP analysis. Returns the learned clause (asserting literal
    /// first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, usize) {
        let current = self.decision_level();
        let mut learnt: Vec<Lit> = vec![0];
        let mut pending = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl].len() {
                let q = self.clauses[confl][k];
                let v = var_of(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var_of(self.trail[idx])] {
                    break;
                }
            }
            let lit = self.trail[idx];
            self.seen[var_of(lit)] = false;
            pending -= 1;
            p = Some(lit);
            if pending == 0 {
                break;
            }
            confl = self.reason[var_of(lit)].expect("implied literal has a reason");
        }
        learnt[0] = neg(p.unwrap());
        for &l in &learnt[1..] {
            self.seen[var_of(l)] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for k in 2..learnt.len() {
                if self.level[var_of(learnt[k])] > self.level[var_of(learnt[best])] {
                    best = k;
                }
            }
            learnt.swap(1, best);
            back = self.level[var_of(learnt[1])];
        }
        (learnt, back)
    }

    fn backtrack(&mut self, to: usize) {
        if self.decision_level() <= to {
            return;
        }
        let keep = self.trail_lim[to];
        for &l in &self.trail[keep..] {
            let v = var_of(l);
            self.assign[v] = None;
            self.reason[v] = None;
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(to);
        self.qhead = keep;
    }

    fn solve(&mut self, limits: &SolverLimits) -> Result<Outcome> {
        if self.unsat {
            return Ok(Outcome::Unsat);
        }
        let mut next_var = 0;
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                if self.conflicts > limits.max_conflicts {
                    return Err(Error::ResourceCap(format!("more than {} conflicts", limits.max_conflicts)));
                }
                if self.decision_level() == 0 {
                    self.unsat = true;
                    return Ok(Outcome::Unsat);
                }
                let (learnt, back) = self.analyze(confl);
                self.backtrack(back);
                next_var = 0;
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let lit = learnt[0];
                    let ci = self.attach(learnt);
                    self.enqueue(lit, Some(ci));
                }
                continue;
            }
            while next_var < self.assign.len() && self.assign[next_var].is_some() {
                next_var += 1;
            }
            if next_var == self.assign.len() {
                return Ok(Outcome::Sat);
            }
            self.trail_lim.push(self.trail.len());
            self.enqueue(2 * next_var as u32 + 1, None);
        }
    }

    fn model(&self) -> Vec<bool> {
        std::iter::once(false).chain(self.assign.iter().map(|v| v.unwrap_or(false))).collect()
    }
}

fn load(cnf: &CnfInstance) -> Solver {
    let mut s = Solver::new(cnf.num_vars() as usize);
    for c in cnf.clauses() {
        s.add_clause(c);
    }
    s
}

/// One satisfying assignment, indexed by DIMACS variable (index 0 unused).
pub fn solve(cnf: &CnfInstance) -> Result<Option<Vec<bool>>> {
    solve_with(cnf, SolverLimits::default())
}

pub fn solve_with(cnf: &CnfInstance, limits: SolverLimits) -> Result<Option<Vec<bool>>> {
    let mut s = load(cnf);
    match s.solve(&limits)? {
        Outcome::Sat => Ok(Some(s.model())),
        Outcome::Unsat => Ok(None),
    }
}

/// Enumerates assignments that differ on the projection variables: one full
/// assignment per distinct projection, each indexed by DIMACS variable.
pub fn enumerate_models(cnf: &CnfInstance, project: &[u32], limits: SolverLimits) -> Result<Vec<Vec<bool>>> {
    let mut s = load(cnf);
    let mut out = Vec::new();
    while let Outcome::Sat = s.solve(&limits)? {
        let model = s.model();
        let block: Vec<i32> =
            project.iter().map(|&v| if model[v as usize] { -(v as i32) } else { v as i32 }).collect();
        out.push(model);
        if out.len() > limits.max_models {
            return Err(Error::ResourceCap(format!("more than {} models", limits.max_models)));
        }
        if block.is_empty() {
            break;
        }
        s.backtrack(0);
        s.add_clause(&block);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(cnf: &CnfInstance) -> Vec<Vec<bool>> {
        let n = cnf.num_vars();
        (0u32..1 << n)
            .map(|bits| std::iter::once(false).chain((0..n).map(|i| bits >> i & 1 == 1)).collect::<Vec<bool>>())
            .filter(|m| cnf.clauses().iter().all(|c| c.iter().any(|&l| m[l.unsigned_abs() as usize] == (l > 0))))
            .collect()
    }

    fn satisfies(cnf: &CnfInstance, m: &[bool]) -> bool {
        cnf.clauses().iter().all(|c| c.iter().any(|&l| m[l.unsigned_abs() as usize] == (l > 0)))
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        let p = |i: i32, h: i32| i * 2 + h + 1;
        let mut clauses = Vec::new();
        for i in 0..3 {
            clauses.push(vec![p(i, 0), p(i, 1)]);
        }
        for h in 0..2 {
            for i in 0..3 {
                for j in i + 1..3 {
                    clauses.push(vec![-p(i, h), -p(j, h)]);
                }
            }
        }
        assert_eq!(solve(&CnfInstance::new(6, clauses)).unwrap(), None);
    }

    #[test]
    fn empty_clause_and_empty_formula() {
        assert_eq!(solve(&CnfInstance::new(1, vec![vec![]])).unwrap(), None);
        assert!(solve(&CnfInstance::new(0, vec![])).unwrap().is_some());
    }

    #[test]
    fn conflict_cap_is_reported() {
        let p = |i: i32, h: i32| i * 4 + h + 1;
        let mut clauses = Vec::new();
        for i in 0..5 {
            clauses.push((0..4).map(|h| p(i, h)).collect());
        }
        for h in 0..4 {
            for i in 0..5 {
                for j in i + 1..5 {
                    clauses.push(vec![-p(i, h), -p(j, h)]);
                }
            }
        }
        let limits = SolverLimits { max_models: 1, max_conflicts: 2 };
        assert!(matches!(solve_with(&CnfInstance::new(20, clauses), limits), Err(Error::ResourceCap(_))));
    }

    fn arb_cnf() -> impl Strategy<Value = CnfInstance> {
        (1u32..8).prop_flat_map(|n| {
            let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
            prop::collection::vec(prop::collection::vec(lit, 0..4), 0..14)
                .prop_map(move |clauses| CnfInstance::new(n, clauses))
        })
    }

    proptest! {
        #[test]
        fn agrees_with_truth_table(cnf in arb_cnf()) {
            let expected = brute(&cnf);
            match solve(&cnf).unwrap() {
                Some(m) => prop_assert!(satisfies(&cnf, &m)),
                None => prop_assert!(expected.is_empty()),
            }
            let all: Vec<u32> = (1..=cnf.num_vars()).collect();
            let mut found = enumerate_models(&cnf, &all, SolverLimits::default()).unwrap();
            found.sort();
            let mut expected = expected;
            expected.sort();
            prop_assert_eq!(found, expected);
        }

        #[test]
        fn projection_counts_distinct_restrictions(cnf in arb_cnf(), k in 1u32..4) {
            let k = k.min(cnf.num_vars());
            let project: Vec<u32> = (1..=k).collect();
            let found = enumerate_models(&cnf, &project, SolverLimits::default()).unwrap();
            let restrict = |m: &Vec<bool>| m[1..=k as usize].to_vec();
            let got: std::collections::BTreeSet<_> = found.iter().map(restrict).collect();
            prop_assert_eq!(got.len(), found.len());
            let expected: std::collections::BTreeSet<_> = brute(&cnf).iter().map(restrict).collect();
            prop_assert_eq!(got, expected);
        }
    }
}
