use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use tppforge::search::TripleRecord;

fn tppforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tppforge"))
        .args(args)
        .env_remove("TPPFORGE_ENUM_CAP")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let trivial = write(&dir, "t", "0\n0\n0\n");
    assert_eq!(
        tppforge(&["check", "cyclic:1", s(&trivial)]).status.code(),
        Some(0)
    );

    let bad = write(&dir, "bad", "# Z2 counterexample\n0 1\n0 1\n0\n");
    let o = tppforge(&["check", "cyclic:2", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("q_intersections_trivial: false"));

    let short = write(&dir, "short", "0\n0\n");
    let o = tppforge(&["check", "cyclic:2", s(&short)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    assert_eq!(
        tppforge(&["check", "cyclic:0", s(&trivial)]).status.code(),
        Some(2)
    );
    assert_eq!(
        tppforge(&["check", "cyclic:1", "/nonexistent/triple"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn normalize_command() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "t", "2 3\n0\n0\n");
    let o = tppforge(&["--quiet", "normalize", "cyclic:6", s(&t)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 1\n0\n0\n");

    let already = write(&dir, "n", "0 1\n0\n0\n");
    let o = tppforge(&["--quiet", "normalize", "cyclic:6", s(&already)]);
    assert_eq!(stdout(&o), "0 1\n0\n0\n");

    let bad = write(&dir, "bad", "0 1\n0 1\n0\n");
    assert_eq!(
        tppforge(&["normalize", "cyclic:2", s(&bad)]).status.code(),
        Some(1)
    );
}

#[test]
fn search_command() {
    let o = tppforge(&["search", "cyclic:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("best_product: 1\n"));

    let best = |prune: &str| {
        let o = tppforge(&["search", "symmetric:3", "--prune", prune]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        let line = text
            .lines()
            .find(|l| l.starts_with("best_product:"))
            .unwrap()
            .to_string();
        assert!(text.contains("nodes_visited:"));
        line
    };
    assert_eq!(best("q-bound"), best("none"));

    let o = tppforge(&["search", "cyclic:6", "--time-limit", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("completed: false"));

    assert_eq!(
        tppforge(&["search", "cyclic:6", "--prune", "fast"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        tppforge(&["search", "cyclic:6", "--workers", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        tppforge(&["search", "cyclic:6", "--bogus"]).status.code(),
        Some(2)
    );
}

#[test]
fn search_records_round_trip_through_check() {
    let dir = TempDir::new().unwrap();
    let o = tppforge(&["search", "dihedral:4", "--prune", "all"]);
    let text = stdout(&o);
    let records: Vec<_> = text.lines().filter(|l| l.starts_with("tpp\t")).collect();
    assert!(!records.is_empty());
    for (i, line) in records.iter().enumerate() {
        let rec = TripleRecord::parse(line).unwrap();
        assert_eq!(rec.group, "dihedral:4");
        let path = write(&dir, &format!("r{i}"), &rec.to_triple_text());
        let check = tppforge(&["check", &rec.group, s(&path)]);
        assert_eq!(check.status.code(), Some(0), "{line}");
    }
    let quiet = tppforge(&["--quiet", "search", "dihedral:4"]);
    assert!(!stdout(&quiet).contains("tpp\t"));
}

#[test]
fn realize_command() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "t", "0\n0\n0\n");
    let a = write(&dir, "a", "1 1\n0\n0\n6\n");
    let b = write(&dir, "b", "1 1\n0\n0\n-7\n");
    let o = tppforge(&["realize", "cyclic:1", s(&t), s(&a), s(&b)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("1 1\n0\n0\n-42\nMATCH\n"));

    // A maximal S3 triple from the search, with fixed matrices.
    let o = tppforge(&["--quiet", "search", "symmetric:3"]);
    let line = stdout(&tppforge(&["search", "symmetric:3"]))
        .lines()
        .find(|l| l.starts_with("tpp\t"))
        .unwrap()
        .to_string();
    assert_eq!(o.status.code(), Some(0));
    let rec = TripleRecord::parse(&line).unwrap();
    let t = write(&dir, "s3", &rec.to_triple_text());
    let lit = |v: &Vec<usize>| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let [ss, tt, uu] = &rec.sets;
    let mut a_text = format!("{} {}\n{}\n{}\n", ss.len(), tt.len(), lit(ss), lit(tt));
    for i in 0..ss.len() {
        a_text += &(0..tt.len())
            .map(|j| (3 * i as i64 - 2 * j as i64 + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ");
        a_text += "\n";
    }
    let mut b_text = format!("{} {}\n{}\n{}\n", tt.len(), uu.len(), lit(tt), lit(uu));
    for i in 0..tt.len() {
        b_text += &(0..uu.len())
            .map(|j| (5 * j as i64 - i as i64 * i as i64).to_string())
            .collect::<Vec<_>>()
            .join(" ");
        b_text += "\n";
    }
    let a = write(&dir, "sa", &a_text);
    let b = write(&dir, "sb", &b_text);
    let o = tppforge(&["realize", "symmetric:3", s(&t), s(&a), s(&b)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("MATCH\n"));

    // Column labels of B do not match U.
    let wrong = b_text.replacen(&format!("\n{}\n", lit(uu)), "\n5 4\n", 1);
    let wrong = write(&dir, "wrong", &wrong);
    assert_eq!(
        tppforge(&["realize", "symmetric:3", s(&t), s(&a), s(&wrong)])
            .status
            .code(),
        Some(2)
    );

    let not_tpp = write(&dir, "nt", "0 1\n0 1\n0\n");
    let a2 = write(&dir, "a2", "2 2\n0 1\n0 1\n1 2\n3 4\n");
    let b2 = write(&dir, "b2", "2 1\n0 1\n0\n1\n1\n");
    assert_eq!(
        tppforge(&["realize", "cyclic:2", s(&not_tpp), s(&a2), s(&b2)])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn sweep_command() {
    let o = tppforge(&["sweep", "--max-order", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let summaries: Vec<_> = text.lines().filter(|l| !l.contains('\t')).collect();
    assert_eq!(summaries.len(), 2, "{text}");
    assert!(summaries[0].starts_with("cyclic:1:"));
    assert!(summaries[1].starts_with("symmetric:1:"));

    let o = tppforge(&["sweep", "--max-order", "8"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines().filter(|l| !l.contains('\t')) {
        assert!(
            line.contains("bounds=ok") && line.contains("realize=MATCH"),
            "{line}"
        );
    }

    assert_eq!(
        tppforge(&["sweep", "--max-order", "1000"]).status.code(),
        Some(2)
    );
}

#[test]
fn enumeration_cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_tppforge"))
        .args(["sweep", "--max-order", "6"])
        .env("TPPFORGE_ENUM_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn table_file_groups() {
    let dir = TempDir::new().unwrap();
    let table = write(&dir, "z3.txt", "# Z3\n3\n0 1 2\n1 2 0\n2 0 1\n");
    let t = write(&dir, "t", "0 1 2\n0\n0\n");
    assert_eq!(
        tppforge(&["check", s(&table), s(&t)]).status.code(),
        Some(0)
    );
    let broken = write(&dir, "broken.txt", "3\n0 1 2\n1 1 0\n2 0 1\n");
    let o = tppforge(&["check", s(&broken), s(&t)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a Latin square"));
}
