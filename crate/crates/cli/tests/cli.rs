use std::path::PathBuf;
use std::process::{Command, Output};

const P5: &str = "a | b.\n:- not c.\nc :- a, b.\na :- c.\nb :- c.\n";
const Q5: &str = ":- not c.\nc :- a, b.\na :- c.\nb :- c.\n";
const S: &str = "b ; b\nc ; c\na b ; a b c d\nc d ; a b c d\na b c d ; a b c d\n";

fn fixture(name: &str, text: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualnorm")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn solve_p5_has_no_answer_sets() {
    let out = run(&["solve", &fixture("p5.lp", P5), "--method", "brute"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "");
}

#[test]
fn se_models_of_p5() {
    let out = run(&["se", &fixture("p5.lp", P5)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "a ; a b c\na b c ; a b c\nb ; a b c\n");
}

#[test]
fn strong_equivalence_witness() {
    let out = run(&["equiv", &fixture("p5.lp", P5), &fixture("q5.lp", Q5), "--mode", "strong"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "; a b c\n");
    let same = run(&["equiv", &fixture("p5.lp", P5), &fixture("p5b.lp", P5), "--mode", "strong"]);
    assert_eq!(code(&same), 0);
    assert_eq!(stdout(&same), "");
}

#[test]
fn solve_methods_agree() {
    for (i, text) in ["a | b.", "a :- not b. b :- not a.", "a | b. :- not c. a :- c. b :- c.", "a :- not a.", "a | b | c :- d. d. :- a, b."]
        .iter()
        .enumerate()
    {
        let file = fixture(&format!("m{i}.lp"), text);
        let outs: Vec<Output> = ["brute", "dn", "sat"].iter().map(|m| run(&["solve", &file, "--method", m])).collect();
        assert!(outs.windows(2).all(|w| w[0].stdout == w[1].stdout && w[0].status == w[1].status), "{text}");
    }
}

#[test]
fn uniform_fast_and_brute_agree() {
    let p = fixture("u1.lp", "a | b. a :- b.");
    let q = fixture("u2.lp", "a.");
    let brute = run(&["equiv", &p, &q, "--mode", "uniform"]);
    let fast = run(&["equiv", &p, &q, "--mode", "uniform", "--dn-fast"]);
    assert_eq!(code(&brute), code(&fast));
    assert_eq!(brute.stdout, fast.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["solve", &fixture("bad.lp", "a :- .")])), 2);
    assert_eq!(code(&run(&["solve", &fixture("reserved.lp", "__x.")])), 2);
    assert_eq!(code(&run(&["solve", &fixture("reserved.lp", "__x."), "--allow-reserved"])), 0);
    assert_eq!(code(&run(&["solve", &fixture("big.lp", "a | b | c | d."), "--budget", "3"])), 3);
    assert_eq!(code(&run(&["solve", &fixture("nondn.lp", "c :- a, b. a. b."), "--method", "dn"])), 2);
    assert_eq!(code(&run(&["solve", "/nonexistent/file.lp"])), 2);
}

#[test]
fn output_is_deterministic() {
    let file = fixture("det.lp", "a | b | c. d :- a. d :- b.");
    let first = run(&["translate", &file, "--to", "star"]);
    let second = run(&["translate", &file, "--to", "star"]);
    assert_eq!(first.stdout, second.stdout);
    let g1 = run(&["gen", "--seed", "7", "--atoms", "5", "--rules", "8"]);
    let g2 = run(&["gen", "--seed", "7", "--atoms", "5", "--rules", "8"]);
    assert_eq!(g1.stdout, g2.stdout);
}

#[test]
fn translated_program_reads_back() {
    let out = run(&["translate", &fixture("ab.lp", "a | b."), "--to", "normal"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("__c_t_a :- __c_a_a, __c_b_a."), "{text}");
    let back = fixture("ab_trans.lp", &text);
    assert_eq!(code(&run(&["classify", &back])), 2);
    let labels = run(&["classify", &back, "--allow-reserved"]);
    assert!(stdout(&labels).contains("\"normal\": true"));
    let sets = run(&["solve", &back, "--allow-reserved"]);
    assert_eq!(code(&sets), 0);
}

#[test]
fn dimacs_export() {
    let out = run(&["translate", &fixture("ab.lp", "a | b."), "--to", "dimacs", "--project"]);
    let text = stdout(&out);
    assert!(text.starts_with("c project 1 2\nc 1 = a\nc 2 = b\n"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("p cnf ")));
}

#[test]
fn se_set_commands() {
    let s = fixture("s.se", S);
    let props = run(&["props", &s]);
    let text = stdout(&props);
    assert!(text.contains("\"ue_complete\": true"));
    assert!(text.contains("\"splittable\": false"));
    let synth = run(&["synth", &s, "--from", "ue"]);
    assert_eq!(code(&synth), 1);

    let p5 = run(&["se", &fixture("p5.lp", P5)]);
    assert_eq!(code(&run(&["synth", &fixture("p5.se", &stdout(&p5)), "--from", "se"])), 1);

    let r5 = run(&["se", &fixture("r5.lp", "a | b.\n:- not c.\na :- c.\nb :- c.\n")]);
    let built = run(&["synth", &fixture("r5.se", &stdout(&r5)), "--from", "se"]);
    assert_eq!(code(&built), 0);
    let again = run(&["se", &fixture("r5_synth.lp", &stdout(&built))]);
    assert_eq!(stdout(&again), stdout(&r5));
}

#[test]
fn ue_listing() {
    let out = run(&["ue", &fixture("p5.lp", P5), "--json"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("\"here\""));
}

#[test]
fn reductions() {
    let qbf = fixture("f.qbf", "exists x\nforall y\nterm x x y\nterm x x -y\n");
    let out = run(&["reduce", "qbf", &qbf]);
    assert_eq!(code(&out), 0);
    let program = fixture("f.lp", &stdout(&out));
    assert_eq!(code(&run(&["solve", &program, "--allow-reserved"])), 0);

    let cnf = fixture("f.cnf", "clause 1 1 1\nclause -1 -1 -1\n");
    let out = run(&["reduce", "unsat", &cnf]);
    let program = fixture("u.lp", &stdout(&out));
    let reference = fixture("ref.lp", "a. :- a.");
    let verdict = run(&["equiv", &program, &reference, "--mode", "strong", "--allow-reserved"]);
    assert_eq!(code(&verdict), 0);
}

#[test]
fn trace_json() {
    let out = run(&["trace", &fixture("ab.lp", "a | b."), "--model", "a", "--exclude", "a"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("\"t_eliminated\": true"));
    assert!(text.contains("\"__t_a\""));
    let out = run(&["trace", &fixture("ab.lp", "a | b."), "--model", "a b", "--exclude", "a"]);
    assert_eq!(code(&out), 1);
    let out = run(&["trace", &fixture("ab.lp", "a | b."), "--model", "a", "--exclude", "b"]);
    assert_eq!(code(&out), 2);
}
