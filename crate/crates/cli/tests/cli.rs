use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn netbench(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_netbench"));
    cmd.args(args).env_remove("DIALOG_NETBENCH_LIMITS");
    cmd
}

fn run(args: &[&str]) -> Output {
    netbench(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn plan_prints_value_and_plan_for_every_algorithm() {
    let file = data("two_op.plan.txt");
    for algo in ["dp", "bnb", "brute"] {
        let o = run(&["plan", path(&file), "--algo", algo]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = stdout(&o);
        assert!(text.starts_with("value 4\nplan [a, b, a]\n"), "{text}");
        assert!(text.contains(&format!("algorithm {algo}\n")));
    }
    let o = run(&["plan", path(&file), "--algo", "brute", "--parallel"]);
    assert!(stdout(&o).starts_with("value 4\nplan [a, b, a]\n"));
}

#[test]
fn plan_handles_discount_and_goal() {
    let o = run(&["plan", path(&data("two_op_discounted.plan.txt"))]);
    assert!(stdout(&o).starts_with("value 5/2\n"), "{}", stdout(&o));
    let o = run(&["plan", path(&data("two_op_goal.plan.txt"))]);
    assert!(stdout(&o).starts_with("value 1\nplan [a]\n"), "{}", stdout(&o));
}

#[test]
fn pareto_lists_points() {
    let o = run(&["pareto", path(&data("two_op.plan.txt"))]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("point cost=")));
    assert!(text.contains("point cost=0 utility=0 plan=[]"), "{text}");
    assert!(text.contains("point cost=3 utility=7 plan=[a, b, a]"), "{text}");
}

#[test]
fn validate_reports_located_errors() {
    let o = run(&["validate", path(&data("two_op.plan.txt"))]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("ok problem "));
    let o = run(&["validate", path(&data("water.dlg.txt"))]);
    assert!(stdout(&o).starts_with("ok dialog water "), "{}", stdout(&o));

    let o = run(&["validate", path(&data("horizon_zero.plan.txt"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("horizon_zero.plan.txt:4:9: semantic error: horizon must be positive"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["plan"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--class", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["plan", "/definitely/missing.plan.txt"]).status.code(), Some(2));
    let o =
        netbench(&["plan", path(&data("two_op.plan.txt"))]).env("DIALOG_NETBENCH_LIMITS", "bogus").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn limit_refusal_exits_three() {
    let o = netbench(&["plan", path(&data("two_op.plan.txt")), "--algo", "brute"])
        .env("DIALOG_NETBENCH_LIMITS", "brute=2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o =
        netbench(&["validate", path(&data("water.dlg.txt"))]).env("DIALOG_NETBENCH_LIMITS", "ops=3").output().unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = run(&["gen", "--class", "constant_cost", "--seed", "7"]);
    let b = run(&["gen", "--class", "constant_cost", "--seed", "7"]);
    let c = run(&["gen", "--class", "constant_cost", "--seed", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.plan.txt");
    let o = run(&["gen", "--class", "constant_cost", "--seed", "7", "-o", path(&file)]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&file).unwrap(), a.stdout);
    assert!(run(&["validate", path(&file)]).status.success());
}

#[test]
fn bench_agrees_on_generated_directory() {
    let dir = tempfile::tempdir().unwrap();
    let classes = ["constant_cost", "constant_utility_and_cost", "varying_utility_constant_cost"];
    let objectives = ["mincost", "netbenefit", "discounted"];
    let mut count = 0;
    for (i, class) in classes.iter().enumerate() {
        for (j, objective) in objectives.iter().enumerate() {
            let seed = (10 * i + j).to_string();
            let file = dir.path().join(format!("{class}_{objective}.plan.txt"));
            let o = run(&["gen", "--class", class, "--objective", objective, "--seed", &seed, "-o", path(&file)]);
            assert!(o.status.success(), "{}", stderr(&o));
            count += 1;
        }
    }
    for parallel in [false, true] {
        let mut args = vec!["bench", path(dir.path())];
        if parallel {
            args.push("--parallel");
        }
        let o = run(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = stdout(&o);
        let verdicts: Vec<&str> = text.lines().filter(|l| l.contains(" agree=")).collect();
        assert_eq!(verdicts.len(), count);
        assert!(verdicts.iter().all(|l| l.ends_with("agree=yes bnb_le_brute=yes")), "{text}");
        assert!(text.ends_with(&format!("instances={count} agreed={count} bnb_le_brute={count} failed=0\n")), "{text}");
    }
}

#[test]
fn chat_transcript_matches_simulate() {
    let spec = data("water.dlg.txt");
    let sim = run(&["simulate", path(&spec), "--answers", path(&data("water_answers.txt"))]);
    assert!(sim.status.success());
    assert!(stdout(&sim).ends_with("realized_value=6 status=horizon_exhausted\n"), "{}", stdout(&sim));

    let mut child = netbench(&["chat", path(&spec)])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"nowhere\ncityB\nirrigate\n").unwrap();
    let chat = child.wait_with_output().unwrap();
    assert!(chat.status.success(), "{}", stderr(&chat));
    assert_eq!(stdout(&chat), stdout(&sim));
    let talk = stderr(&chat);
    assert!(talk.contains("please answer one of: cityA, cityB"), "{talk}");
    assert!(talk.contains("Water in cityB is checked for irrigate use."), "{talk}");
}

#[test]
fn chat_abandons_on_end_of_input() {
    let mut child = netbench(&["chat", path(&data("water.dlg.txt"))])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    drop(child.stdin.take());
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).ends_with("realized_value=0 status=user_abandoned\n"), "{}", stdout(&o));
}

#[test]
fn simulate_with_seed_is_reproducible() {
    let spec = data("water.dlg.txt");
    let a = run(&["simulate", path(&spec), "--seed", "3"]);
    let b = run(&["simulate", path(&spec), "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("realized_value=6 "), "{}", stdout(&a));
    let o = run(&["simulate", path(&spec), "--seed", "3", "--answers", path(&data("water_answers.txt"))]);
    assert_eq!(o.status.code(), Some(2));
}
