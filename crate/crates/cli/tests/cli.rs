use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pinwheel"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pinwheel-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
}

#[test]
fn solve_exact_exit_codes() {
    let yes = scratch("two.txt", "2\n2\n");
    let o = run(&["solve-exact", yes.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "verdict"), Some("schedulable"));
    let no = scratch("236.txt", "2\n3\n6\n");
    let o = run(&["solve-exact", no.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(field(&stdout(&o), "verdict"), Some("unschedulable"));
}

#[test]
fn decide_rejects_overfull() {
    let p = scratch("222.txt", "2\n2\n2\n");
    let o = run(&["decide", "--eps", "1/4", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(field(&stdout(&o), "verdict"), Some("unschedulable"));
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        run(&["solve-exact", "/nonexistent/file"]).status.code(),
        Some(2)
    );
    let p = scratch("bad.txt", "2\nthree\n");
    assert_eq!(
        run(&["solve-exact", p.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let p = scratch("ok.txt", "3\n");
    assert_eq!(
        run(&["decide", "--eps", "1/2", p.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn schedules_round_trip_through_validate() {
    let inst = scratch("456.txt", "4\n5\n6\n");
    let i = inst.to_str().unwrap();
    let o = run(&["solve-exact", i]);
    let sched = scratch("456.sched", &stdout(&o));
    let v = run(&["validate", i, sched.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));

    let o = run(&["--json", "solve-exact", i]);
    let sched = scratch("456.json", &stdout(&o));
    assert_eq!(
        run(&["validate", i, sched.to_str().unwrap()]).status.code(),
        Some(0)
    );

    let o = run(&["decide", "--construct", i]);
    assert_eq!(field(&stdout(&o), "verdict"), Some("scaled-schedulable"));
    let repr = scratch("456.repr", &stdout(&o));
    let r = repr.to_str().unwrap();
    assert_eq!(
        run(&["validate", "--scale", "5/4", i, r]).status.code(),
        Some(0)
    );

    let wrong = scratch("wrong.sched", "period: 2\nslots: 1 2\n");
    assert_eq!(
        run(&["validate", i, wrong.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn ps_reduction_is_dense_and_witness_validates() {
    let o = run(&["gen", "sat", "--vars", "4", "--clauses", "3", "--seed", "1"]);
    let cnf = scratch("f.cnf", &stdout(&o));
    let c = cnf.to_str().unwrap();
    let red = run(&["reduce", "ps", "--cnf", c]);
    assert_eq!(red.status.code(), Some(0));

    let mut child = bin()
        .arg("validate-density")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&red.stdout).unwrap();
    let d = child.wait_with_output().unwrap();
    assert_eq!(field(&stdout(&d), "density"), Some("1/1"));

    let inst = scratch("ps.txt", &stdout(&red));
    let w = run(&["witness", "--cnf", c]);
    assert_eq!(w.status.code(), Some(0));
    let wf = scratch("w.txt", &stdout(&w));
    let v = run(&["validate", inst.to_str().unwrap(), wf.to_str().unwrap()]);
    assert_eq!(field(&stdout(&v), "verdict"), Some("valid"));
}

#[test]
fn unsatisfiable_formula_has_no_witness() {
    let mut text = String::from("p cnf 3 8\n");
    for bits in 0..8 {
        let c: Vec<String> = (0..3)
            .map(|k| {
                if bits >> k & 1 == 1 {
                    format!("{}", k + 1)
                } else {
                    format!("-{}", k + 1)
                }
            })
            .collect();
        text.push_str(&format!("{} 0\n", c.join(" ")));
    }
    let cnf = scratch("unsat.cnf", &text);
    let o = run(&["witness", "--cnf", cnf.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(field(&stdout(&o), "verdict"), Some("unsatisfiable"));
}

#[test]
fn constant_gap_and_related_reductions() {
    let o = run(&["check", "constant-gap", "--demands", "2,1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[
        "check",
        "constant-gap",
        "--demands",
        "2,1,1",
        "--offsets",
        "0,0,1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let inst = scratch("236b.txt", "2\n3\n6\n");
    let o = run(&["reduce", "bgt", "--instance", inst.to_str().unwrap()]);
    assert_eq!(field(&stdout(&o), "k"), Some("36"));
    let o = run(&["reduce", "rs", "--instance", inst.to_str().unwrap()]);
    assert_eq!(field(&stdout(&o), "saturation"), Some("2 3 6"));
    let sparse = scratch("sparse.txt", "3\n");
    assert_eq!(
        run(&["reduce", "rs", "--instance", sparse.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_suite_single_criterion() {
    let o = run(&["verify-suite", "--quick", "--criterion", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS [ 1]"));
}
