use std::path::Path;
use std::process::{Command, Output};

use padist::format::read_distribution;
use padist::group::{GroupElement, GroupModel};

fn padist(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padist")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn expand_writes_the_dirac_expansion() {
    let dir = tempfile::tempdir().unwrap();
    let o = padist(&["expand", "--group", "heisenberg:5", "--elem", "1,1,0", "-T", "6"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let d = read_distribution(&stdout(&o)).unwrap();
    // δ_{h1 h2} = (1 + b1)(1 + b2): the coordinates of h1·h2 are (1,1,0)
    let m = d.model().clone();
    let g = GroupElement::basis(&m, 0).mul(&GroupElement::basis(&m, 1)).unwrap();
    assert!(d.agrees_with(&padist::dist::Distribution::dirac(&g, 6.into()).unwrap()));
    assert_eq!(d.terms().len(), 4);
    assert!(d.is_exact());
}

#[test]
fn norm_of_b1_at_half() {
    let dir = tempfile::tempdir().unwrap();
    let o = padist(&["expand", "--group", "abelian:1:5", "--mono", "1", "-T", "6", "--out", "f.dist"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = padist(&["norm", "--in", "f.dist", "--r", "1/2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "p^-1/2 .. p^-1/2");
}

#[test]
fn verify_commutator_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = padist(&["verify", "lemma44", "--group", "heisenberg:5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.starts_with("suite lemma44 "));
    assert!(text.contains("anchor: "));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn verify_tsv_is_stable_under_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "prop42", "--seed", "7", "--samples", "20", "--format", "tsv"];
    let (a, b) = (padist(&args, dir.path()), padist(&args, dir.path()));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).starts_with("suite\tcheck\tverdict\tanchor\twitness\n"));
}

#[test]
fn multiplication_and_projection_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(padist(&["expand", "--group", "abelian:2:5", "--elem", "2,3", "-T", "4", "--out", "g.dist"], p).status.code(), Some(0));
    assert_eq!(padist(&["expand", "--group", "abelian:2:5", "--elem", "1,-1", "-T", "4", "--out", "h.dist"], p).status.code(), Some(0));
    let o = padist(&["mul", "g.dist", "h.dist", "--out", "gh.dist"], p);
    assert_eq!(o.status.code(), Some(0));
    let gh = read_distribution(&std::fs::read_to_string(p.join("gh.dist")).unwrap()).unwrap();
    let m = std::sync::Arc::new(GroupModel::abelian(2, 5, 12).unwrap());
    let want = padist::dist::Distribution::dirac(&GroupElement::from_ints(&m, &[3, 2]).unwrap(), 4.into()).unwrap();
    assert!(gh.agrees_with(&want));
    let o = padist(&["project", "--in", "gh.dist", "--level", "1"], p);
    assert_eq!(stdout(&o).trim(), "0:1:12*[3,2]");
}

#[test]
fn other_subcommands_run() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    padist(&["expand", "--group", "abelian:1:5", "--lie", "1", "-T", "12", "--out", "lie.dist"], p);
    let o = padist(&["pair", "--in", "lie.dist", "--fn", "coord:1"], p);
    assert!(stdout(&o).starts_with("value=0:1:12 "), "{}", stdout(&o));
    let o = padist(&["symbol", "--in", "lie.dist", "--r", "1/8"], p);
    assert_eq!(stdout(&o), "degree=-3/8\ngraded p=5 omega=1/1 s=1/8\n1*e0^-1*X1^5\n");
    let o = padist(&["grade", "--log", "--group", "heisenberg:5", "--r", "1/2"], p);
    assert!(stdout(&o).starts_with("grade=3\n"));
    std::fs::write(p.join("ideal.txt"), "graded p=5 omega=1,1 s=1/2\nX1\n").unwrap();
    let o = padist(&["grade", "--in", "ideal.txt"], p);
    assert!(stdout(&o).starts_with("grade=1\n"), "{}", stdout(&o));

    padist(&["expand", "--group", "abelian:1:5", "--mono", "3", "-T", "6", "--out", "b3.dist"], p);
    let o = padist(&["rthresh", "--in", "b3.dist"], p);
    assert_eq!(o.status.code(), Some(0));
    let o = padist(&["mahler", "--group", "abelian:1:5", "--fn", "exp1p:1", "-A", "4", "--amice", "1/2"], p);
    assert!(stdout(&o).contains("verdict=decaying"));

    padist(&["expand", "--group", "semidirect:5", "--mono", "1", "-T", "6", "--out", "s.dist"], p);
    let o = padist(&["conj", "--in", "s.dist", "--sigma"], p);
    assert_eq!(o.status.code(), Some(0));
    let o = padist(&["qnorm", "--in", "s.dist", "--r", "1/2"], p);
    assert_eq!(stdout(&o).trim(), "p^-1/2 .. p^-1/2");

    padist(&["expand", "--group", "abelian:2:5", "--mono", "1,0", "-T", "6", "--out", "b1.dist"], p);
    let o = padist(&["basis", "--in", "b1.dist", "--basis", "1,1;0,1"], p);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("frame="));
}

#[test]
fn error_classes_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    padist(&["expand", "--group", "abelian:1:5", "--mono", "1", "--out", "f.dist"], p);
    let unknown_group = padist(&["expand", "--group", "torus:5", "--mono", "1"], p).status.code();
    std::fs::write(p.join("bad.dist"), "group=abelian:1:5 p=5 N=12 T=6/1 tail=0 exact=1\n1x : 0:1:12\n").unwrap();
    let malformed = padist(&["norm", "--in", "bad.dist", "--r", "1/2"], p);
    let radius = padist(&["norm", "--in", "f.dist", "--r", "0.5"], p).status.code();
    let radius_range = padist(&["norm", "--in", "f.dist", "--r", "3/2"], p).status.code();
    let trunc = padist(&["expand", "--group", "abelian:1:5", "--mono", "1", "-T=-1"], p).status.code();
    let cap = padist(&["expand", "--group", "abelian:1:5", "--mono", "1", "-N", "60"], p).status.code();
    let usage = padist(&["frobnicate"], p).status.code();

    assert_eq!(unknown_group, Some(2));
    assert_eq!(malformed.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&malformed.stderr).contains("line 2, column 1"));
    assert_eq!(radius, Some(5));
    assert_eq!(radius_range, Some(5));
    assert_eq!(trunc, Some(6));
    assert_eq!(cap, Some(6));
    assert_eq!(usage, Some(2));
}

#[test]
fn unbounded_tail_reports_precision_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    padist(&["expand", "--group", "abelian:1:5", "--lie", "1", "-T", "4", "--out", "lie.dist"], p);
    // log(1+b) has no decaying bound on its coefficients, so x ↦ 1_{p Z_p} cannot be certified
    let o = padist(&["pair", "--in", "lie.dist", "--fn", "ind:0:1", "-A", "4"], p);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}
