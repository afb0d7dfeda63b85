use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use dualnorm::ast::{align, AtomSet, AtomTable, Program};
use dualnorm::classify::classify_labels;
use dualnorm::dual_horn::{answer_sets_dn, elimination_fixpoint_with, pmm};
use dualnorm::gen::{random_program, ProgramClass, ProgramShape};
use dualnorm::oracle::{
    answer_sets_bf, strong_equivalence_witness, uniform_equivalence_witness, OracleBudget,
};
use dualnorm::parser::{
    parse_cnf3, parse_program_with, parse_qbf, parse_se_set, render_program, render_se_pair, render_se_set,
    write_dimacs, ParseOptions,
};
use dualnorm::reductions::{qbf_to_program, unsat_to_singular};
use dualnorm::sat::{answer_sets_via_sat, sat_instance};
use dualnorm::se::{
    program_from_se_set, program_from_ue_set, se_models, se_properties, ue_models, uniform_equivalence_witness_dn,
    SEPair, SESet,
};
use dualnorm::translation::{translate, translate_star};
use dualnorm::Error;

/// Classify, solve, translate and compare dual-normal disjunctive programs.
#[derive(Parser, Debug)]
#[command(name = "dualnorm", version)]
struct Cli {
    /// Largest universe the brute-force procedures may enumerate
    #[arg(long, global = true, value_name = "N")]
    budget: Option<usize>,

    /// Print results as JSON where a textual format is the default
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized commands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Accept atoms with the reserved `__` prefix in input programs
    #[arg(long, global = true)]
    allow_reserved: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the syntactic class labels of a program
    Classify { file: String },
    /// List answer sets, one per line
    Solve {
        file: String,
        #[arg(long, value_enum, default_value_t = Method::Brute)]
        method: Method,
    },
    /// Translate a program
    Translate {
        file: String,
        #[arg(long, value_enum)]
        to: Target,
        /// With `--to dimacs`, add a `c project` line naming the base atom variables
        #[arg(long)]
        project: bool,
    },
    /// List SE-models
    Se { file: String },
    /// List UE-models
    Ue { file: String },
    /// Print the structural properties of an SE-set
    Props { file: String },
    /// Build a dual-normal program from an SE- or UE-set
    Synth {
        file: String,
        #[arg(long, value_enum, default_value_t = Source::Se)]
        from: Source,
    },
    /// Compare two programs; exit 1 with a witness if they differ
    Equiv {
        first: String,
        second: String,
        #[arg(long, value_enum, default_value_t = Mode::As)]
        mode: Mode,
        /// Use the polynomial dual-normal procedures where available
        #[arg(long)]
        dn_fast: bool,
    },
    /// Generate a program from a QBF or a 3-CNF
    Reduce {
        #[arg(value_enum)]
        kind: Reduction,
        file: String,
    },
    /// Print the elimination chain of P^{M,m}
    Trace {
        file: String,
        /// The interpretation M, as space-separated atoms
        #[arg(long)]
        model: String,
        /// The atom m
        #[arg(long)]
        exclude: String,
    },
    /// Print a random program
    Gen {
        #[arg(long, value_enum, default_value_t = Class::DualNormal)]
        class: Class,
        #[arg(long, default_value_t = 4)]
        atoms: usize,
        #[arg(long, default_value_t = 6)]
        rules: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Brute,
    Dn,
    Sat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Normal,
    Star,
    Dimacs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Source {
    Se,
    Ue,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    As,
    Strong,
    Uniform,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Reduction {
    Qbf,
    Unsat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Class {
    General,
    Normal,
    DualNormal,
    DualHorn,
    Singular,
    Positive,
}

impl From<Class> for ProgramClass {
    fn from(c: Class) -> Self {
        match c {
            Class::General => ProgramClass::General,
            Class::Normal => ProgramClass::Normal,
            Class::DualNormal => ProgramClass::DualNormal,
            Class::DualHorn => ProgramClass::DualHorn,
            Class::Singular => ProgramClass::Singular,
            Class::Positive => ProgramClass::Positive,
        }
    }
}

/// Outcome of a command that completed: positive or negative verdict.
enum Verdict {
    Yes,
    No,
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading standard input")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn names(table: &AtomTable, set: &AtomSet) -> Vec<String> {
    table.sorted_names(set).into_iter().map(str::to_owned).collect()
}

fn pair_json(pair: &SEPair, table: &AtomTable) -> serde_json::Value {
    json!({ "here": names(table, &pair.here), "there": names(table, &pair.there) })
}

struct App {
    budget: OracleBudget,
    json: bool,
    seed: u64,
    options: ParseOptions,
    out: String,
}

impl App {
    fn program(&self, path: &str) -> Result<Program> {
        Ok(parse_program_with(&read_input(path)?, self.options)?)
    }

    fn se_set(&self, path: &str) -> Result<(SESet, AtomTable)> {
        let mut table = AtomTable::new();
        let set = parse_se_set(&read_input(path)?, &mut table)?;
        Ok((set, table))
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.out.push_str(text.as_ref());
        self.out.push('\n');
    }

    fn print_json(&mut self, value: &serde_json::Value) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.line(text);
        Ok(())
    }

    fn print_sets(&mut self, table: &AtomTable, sets: impl IntoIterator<Item = AtomSet>) -> Result<()> {
        let mut lists: Vec<Vec<String>> = sets.into_iter().map(|s| names(table, &s)).collect();
        lists.sort();
        if self.json {
            self.print_json(&json!(lists))
        } else {
            for l in lists {
                self.line(l.join(" "));
            }
            Ok(())
        }
    }

    fn print_se_set(&mut self, set: &SESet, table: &AtomTable) -> Result<()> {
        if self.json {
            let mut pairs: Vec<serde_json::Value> = set.pairs.iter().map(|p| pair_json(p, table)).collect();
            pairs.sort_by_key(|v| v.to_string());
            self.print_json(&json!(pairs))
        } else {
            let text = render_se_set(set, table);
            self.out.push_str(&text);
            Ok(())
        }
    }

    fn print_witness(&mut self, pair: &SEPair, table: &AtomTable) -> Result<()> {
        if self.json {
            self.print_json(&pair_json(pair, table))
        } else {
            let text = render_se_pair(pair, table);
            self.line(text);
            Ok(())
        }
    }

    fn run(&mut self, command: Command) -> Result<Verdict> {
        match command {
            Command::Classify { file } => {
                let p = self.program(&file)?;
                self.print_json(&serde_json::to_value(classify_labels(&p))?)?;
                Ok(Verdict::Yes)
            }
            Command::Solve { file, method } => {
                let p = self.program(&file)?;
                let sets = match method {
                    Method::Brute => answer_sets_bf(&p, self.budget)?,
                    Method::Dn => answer_sets_dn(&p, self.budget)?,
                    Method::Sat => answer_sets_via_sat(&p)?,
                };
                let found = !sets.is_empty();
                self.print_sets(p.table(), sets)?;
                Ok(if found { Verdict::Yes } else { Verdict::No })
            }
            Command::Translate { file, to, project } => {
                let p = self.program(&file)?;
                match to {
                    Target::Normal => self.out.push_str(&render_program(&translate(&p))),
                    Target::Star => self.out.push_str(&render_program(&translate_star(&p))),
                    Target::Dimacs => {
                        let cnf = sat_instance(&p)?;
                        if project {
                            let base: Vec<String> = (1..=p.atoms().len()).map(|i| i.to_string()).collect();
                            self.line(format!("c project {}", base.join(" ")));
                        }
                        self.out.push_str(&write_dimacs(&cnf));
                    }
                }
                Ok(Verdict::Yes)
            }
            Command::Se { file } => {
                let p = self.program(&file)?;
                let set = se_models(&p, self.budget)?;
                self.print_se_set(&set, p.table())?;
                Ok(Verdict::Yes)
            }
            Command::Ue { file } => {
                let p = self.program(&file)?;
                let set = ue_models(&se_models(&p, self.budget)?);
                self.print_se_set(&set, p.table())?;
                Ok(Verdict::Yes)
            }
            Command::Props { file } => {
                let (set, _) = self.se_set(&file)?;
                self.print_json(&serde_json::to_value(se_properties(&set))?)?;
                Ok(Verdict::Yes)
            }
            Command::Synth { file, from } => {
                let (set, table) = self.se_set(&file)?;
                let built = match from {
                    Source::Se => program_from_se_set(&set, &table),
                    Source::Ue => program_from_ue_set(&set, &table),
                };
                match built {
                    Ok(p) => {
                        self.out.push_str(&render_program(&p));
                        Ok(Verdict::Yes)
                    }
                    Err(Error::Precondition(reason)) => {
                        eprintln!("dualnorm: {reason}");
                        Ok(Verdict::No)
                    }
                    Err(e) => Err(e.into()),
                }
            }
            Command::Equiv { first, second, mode, dn_fast } => {
                let (p, q) = align(&self.program(&first)?, &self.program(&second)?);
                let table = p.table().clone();
                match mode {
                    Mode::As => {
                        let (a, b) = if dn_fast {
                            (answer_sets_dn(&p, self.budget)?, answer_sets_dn(&q, self.budget)?)
                        } else {
                            (answer_sets_bf(&p, self.budget)?, answer_sets_bf(&q, self.budget)?)
                        };
                        match a.symmetric_difference(&b).next() {
                            None => Ok(Verdict::Yes),
                            Some(m) => {
                                let m = m.clone();
                                self.print_sets(&table, [m])?;
                                Ok(Verdict::No)
                            }
                        }
                    }
                    Mode::Strong | Mode::Uniform => {
                        let witness = match (mode, dn_fast) {
                            (Mode::Strong, _) => strong_equivalence_witness(&p, &q, self.budget)?,
                            (_, true) => uniform_equivalence_witness_dn(&p, &q, self.budget)?,
                            (_, false) => uniform_equivalence_witness(&p, &q, self.budget)?,
                        };
                        match witness {
                            None => Ok(Verdict::Yes),
                            Some(pair) => {
                                self.print_witness(&pair, &table)?;
                                Ok(Verdict::No)
                            }
                        }
                    }
                }
            }
            Command::Reduce { kind, file } => {
                let text = read_input(&file)?;
                let p = match kind {
                    Reduction::Qbf => qbf_to_program(&parse_qbf(&text)?),
                    Reduction::Unsat => unsat_to_singular(&parse_cnf3(&text)?),
                };
                self.out.push_str(&render_program(&p));
                Ok(Verdict::Yes)
            }
            Command::Trace { file, model, exclude } => {
                let p = self.program(&file)?;
                let m = p.table().lookup_all(model.split_whitespace())?;
                let x = p.atom(&exclude).ok_or_else(|| Error::UnknownAtom(exclude.clone()))?;
                let check = pmm(&p, &m, x)?;
                let trace = elimination_fixpoint_with(&check, &format!("__t_{exclude}"), &AtomSet::new())?;
                let table = &trace.table;
                let value = json!({
                    "program": render_program(&check).lines().collect::<Vec<_>>(),
                    "t": table.name(trace.t),
                    "levels": trace.levels.iter().map(|l| names(table, l)).collect::<Vec<_>>(),
                    "max_model": names(table, &trace.max_model),
                    "t_eliminated": trace.t_eliminated,
                });
                self.print_json(&value)?;
                Ok(if trace.t_eliminated { Verdict::Yes } else { Verdict::No })
            }
            Command::Gen { class, atoms, rules } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let p = random_program(&mut rng, &ProgramShape::new(class.into(), atoms, rules));
                self.out.push_str(&render_program(&p));
                Ok(Verdict::Yes)
            }
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. } | Error::ResourceCap(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let budget = cli.budget.map_or_else(OracleBudget::default, OracleBudget::with_max_atoms);
    let mut app = App {
        budget,
        json: cli.json,
        seed: cli.seed,
        options: ParseOptions { allow_reserved: cli.allow_reserved },
        out: String::new(),
    };
    let result = app.run(cli.command);
    let _ = io::stdout().write_all(app.out.as_bytes());
    match result {
        Ok(Verdict::Yes) => ExitCode::SUCCESS,
        Ok(Verdict::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dualnorm: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
