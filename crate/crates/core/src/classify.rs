//! Syntactic program classes and the positive dependency digraph.

use std::collections::{BTreeSet, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::ast::{Atom, AtomSet, Program, Rule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassLabels {
    pub horn: bool,
    pub dual_horn: bool,
    pub normal: bool,
    pub dual_normal: bool,
    pub singular: bool,
    pub positive: bool,
    pub definite: bool,
    pub constraint_free: bool,
    pub hcf: bool,
    pub bcf: bool,
    pub tight: bool,
}

pub fn classify_labels(program: &Program) -> ClassLabels {
    let all = |f: fn(&Rule) -> bool| program.rules().all(f);
    let normal = all(Rule::is_normal);
    let dual_normal = all(Rule::is_dual_normal);
    let sccs = Sccs::of(program);
    ClassLabels {
        horn: all(Rule::is_horn),
        dual_horn: all(Rule::is_dual_horn),
        normal,
        dual_normal,
        singular: normal && dual_normal,
        positive: all(Rule::is_positive),
        definite: all(Rule::is_definite),
        constraint_free: !program.rules().any(Rule::is_constraint),
        hcf: sccs.head_cycle_free(program),
        bcf: sccs.body_cycle_free(program, false),
        tight: sccs.acyclic,
    }
}

/// Positive dependency digraph: `(x, y)` whenever some rule has `x` in its
/// head and `y` in its positive body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepGraph {
    pub vertices: AtomSet,
    pub edges: BTreeSet<(Atom, Atom)>,
}

pub fn dep_graph(program: &Program) -> DepGraph {
    let edges = program
        .rules()
        .flat_map(|r| r.head.iter().flat_map(move |&x| r.pos.iter().map(move |&y| (x, y))))
        .collect();
    DepGraph { vertices: program.atoms(), edges }
}

struct Sccs {
    component: HashMap<Atom, usize>,
    acyclic: bool,
}

impl Sccs {
    fn of(program: &Program) -> Self {
        let dep = dep_graph(program);
        let mut graph = DiGraph::<Atom, ()>::new();
        let nodes: HashMap<Atom, NodeIndex> = dep.vertices.iter().map(|&a| (a, graph.add_node(a))).collect();
        for &(x, y) in &dep.edges {
            graph.add_edge(nodes[&x], nodes[&y], ());
        }
        let mut component = HashMap::new();
        let mut acyclic = !dep.edges.iter().any(|(x, y)| x == y);
        for (id, scc) in tarjan_scc(&graph).into_iter().enumerate() {
            if scc.len() > 1 {
                acyclic = false;
            }
            for n in scc {
                component.insert(graph[n], id);
            }
        }
        Sccs { component, acyclic }
    }

    fn two_in_one_component(&self, atoms: &AtomSet) -> bool {
        let mut seen = BTreeSet::new();
        atoms.iter().any(|a| !seen.insert(self.component[a]))
    }

    fn head_cycle_free(&self, program: &Program) -> bool {
        !program.rules().any(|r| self.two_in_one_component(&r.head))
    }

    fn body_cycle_free(&self, program: &Program, include_constraints: bool) -> bool {
        !program
            .rules()
            .filter(|r| include_constraints || !r.is_constraint())
            .any(|r| self.two_in_one_component(&r.pos))
    }
}

/// Head-cycle free: no rule has two head atoms in one strongly connected
/// component of the dependency graph.
pub fn is_hcf(program: &Program) -> bool {
    Sccs::of(program).head_cycle_free(program)
}

/// Body-cycle free: no proper rule has two positive-body atoms in one
/// strongly connected component. Constraints are not inspected, so every
/// dual-normal program is BCF.
pub fn is_bcf(program: &Program) -> bool {
    Sccs::of(program).body_cycle_free(program, false)
}

/// Stricter variant of [`is_bcf`] that also inspects constraint bodies.
pub fn is_bcf_including_constraints(program: &Program) -> bool {
    Sccs::of(program).body_cycle_free(program, true)
}

/// Tight: the dependency graph has no cycle (self-loops included).
pub fn is_tight(program: &Program) -> bool {
    Sccs::of(program).acyclic
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    const P5: &str = "a | b. :- not c. c :- a, b. a :- c. b :- c.";

    fn edges(p: &Program, pairs: &[(&str, &str)]) -> BTreeSet<(Atom, Atom)> {
        pairs.iter().map(|(x, y)| (p.atom(x).unwrap(), p.atom(y).unwrap())).collect()
    }

    #[test]
    fn labels_of_paper_programs() {
        let p5 = parse_program(P5).unwrap();
        let l = classify_labels(&p5);
        assert!(!l.normal);
        assert!(!l.dual_normal);

        let r5 = parse_program("a | b. :- not c. a :- c. b :- c.").unwrap();
        assert!(classify_labels(&r5).dual_normal);

        let s = classify_labels(&parse_program("a :- not b. b :- not a. :- a, b.").unwrap());
        assert!(s.singular && s.normal && s.dual_normal);
        assert!(!s.dual_horn, "multi-atom constraint breaks dual-Horn");
    }

    #[test]
    fn label_implications() {
        let l = classify_labels(&parse_program("a :- b, c. :- a.").unwrap());
        assert!(l.horn && l.normal && l.positive && !l.definite && !l.constraint_free);
        let l = classify_labels(&parse_program("a | b :- c. c.").unwrap());
        assert!(l.dual_horn && l.dual_normal && !l.horn && l.constraint_free);
        let l = classify_labels(&Program::default());
        assert!(l.horn && l.dual_horn && l.singular && l.definite && l.hcf && l.bcf && l.tight);
    }

    #[test]
    fn dep_graph_examples() {
        let p = parse_program("c :- a, b.").unwrap();
        assert_eq!(dep_graph(&p).edges, edges(&p, &[("c", "a"), ("c", "b")]));
        let p = parse_program("a | b :- c.").unwrap();
        assert_eq!(dep_graph(&p).edges, edges(&p, &[("a", "c"), ("b", "c")]));
        let p = parse_program(P5).unwrap();
        assert_eq!(dep_graph(&p).edges, edges(&p, &[("c", "a"), ("c", "b"), ("a", "c"), ("b", "c")]));
    }

    #[test]
    fn hcf_examples() {
        assert!(is_hcf(&parse_program("a | b.").unwrap()));
        assert!(!is_hcf(&parse_program("a | b :- c. c :- a. c :- b.").unwrap()));
        assert!(is_hcf(&parse_program(P5).unwrap()) == false);
        assert!(is_hcf(&parse_program("a :- b. b :- a. c :- not a.").unwrap()));
    }

    #[test]
    fn bcf_examples() {
        assert!(!is_bcf(&parse_program("c :- a, b. a :- c. b :- c.").unwrap()));
        assert!(is_bcf(&parse_program("c :- a, b.").unwrap()));
        // Dual-normal, but the constraint body lies on a cycle.
        let p = parse_program("a :- b. b :- a. :- a, b.").unwrap();
        assert!(is_bcf(&p));
        assert!(!is_bcf_including_constraints(&p));
    }

    #[test]
    fn tight_examples() {
        assert!(!is_tight(&parse_program("a :- a.").unwrap()));
        assert!(is_tight(&parse_program("a | b.").unwrap()));
        assert!(!is_tight(&parse_program(P5).unwrap()));
        assert!(is_tight(&parse_program("a :- b. b :- c.").unwrap()));
    }
}
