//! Propositional encoding of answer sets and a small solver.

mod cnf;
mod encoding;
mod formula;
mod solver;

pub use cnf::{tseitin_cnf, tseitin_cnf_with_layout, CnfInstance};
pub use encoding::{
    answer_sets_via_sat, answer_sets_via_sat_with, build_f, build_f0, build_fi, build_fmod, decode_model,
    encoding_layout, rules_with_pos_body, sat_instance,
};
pub use formula::{Formula, LevelAtom, Var};
pub use solver::{enumerate_models, solve, solve_with, SolverLimits};
