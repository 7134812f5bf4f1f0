use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fanlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fanlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

#[test]
fn build_writes_root_line_and_is_deterministic() {
    let args = ["build", "--variant", "1", "--family", "canonical", "--depth", "3", "--breadth", "4"];
    let a = fanlab(&args);
    let b = fanlab(&args);
    assert_eq!(code(&a), 0);
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(text.lines().any(|l| l.starts_with("s = [] ; phi = 1/1 ;")));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_variant_is_a_usage_error() {
    let out = fanlab(&["build", "--variant", "4", "--depth", "2", "--breadth", "3"]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&fanlab(&["build", "--colour", "red"])), 2);
}

#[test]
fn verify_fresh_corrupted_and_truncated() {
    let dir = TempDir::new().unwrap();
    let fan = path(&dir, "fan.txt");
    assert_eq!(code(&fanlab(&["build", "--variant", "1", "--depth", "2", "--breadth", "4", "--out", &fan])), 0);
    let ok = fanlab(&["verify", "--input", &fan]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(String::from_utf8(ok.stdout).unwrap().contains("claim2[s=[0]]: pass"));

    let text = fs::read_to_string(&fan).unwrap();
    let bad = path(&dir, "bad.txt");
    let raised: Vec<String> = text
        .lines()
        .map(|l| {
            if l.starts_with("s = [0] ;") {
                l.replacen("phi = 1/3", "phi = 3/2", 1)
            } else {
                l.to_string()
            }
        })
        .collect();
    fs::write(&bad, raised.join("\n")).unwrap();
    let out = fanlab(&["verify", "--input", &bad]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8(out.stdout).unwrap().contains("e[s=[0]]: FAIL"));

    let cut = path(&dir, "cut.txt");
    fs::write(&cut, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&fanlab(&["verify", "--input", &cut])), 2);
    assert_eq!(code(&fanlab(&["verify", "--input", &path(&dir, "missing.txt")])), 2);
}

#[test]
fn classify_each_variant() {
    for (v, name) in [("1", "Discrete"), ("2", "IrrationalLike"), ("3", "CantorTimesNatLike")] {
        let out = fanlab(&["classify", "--variant", v, "--depth", "3", "--breadth", "4"]);
        assert_eq!(code(&out), 0);
        assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), name);
    }
}

#[test]
fn locate_writes_a_verified_trail() {
    let dir = TempDir::new().unwrap();
    let fan = path(&dir, "v1.txt");
    fanlab(&["build", "--variant", "1", "--depth", "3", "--breadth", "4", "--out", &fan]);
    let trail = path(&dir, "trail.txt");
    let out = fanlab(&["locate", "--input", &fan, "--u", "[0]", "--a0", "7/24", "--nmax", "20", "--out", &trail]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&trail).unwrap();
    assert!(text.contains("1 ; V = [[0]] ; a = 1/3 ; b = 5/6 ; x = [0]"));
    assert!(text.lines().any(|l| l.starts_with("20 ; ")));

    let refused = fanlab(&["locate", "--input", &fan, "--u", "[0]", "--a0", "1/4"]);
    assert_eq!(code(&refused), 1);
}

#[test]
fn sum_of_cardinality_disjoint_families() {
    let dir = TempDir::new().unwrap();
    let even = path(&dir, "even.txt");
    let odd = path(&dir, "odd.txt");
    let member = |n: i64| {
        let elems: Vec<String> = (1..=n + 2).map(|i| format!("{i}/{}", n + 3)).collect();
        format!("[{}]", elems.join(", "))
    };
    let fam = |parity: i64| (0..8).map(|j| member(2 * j + parity)).collect::<Vec<_>>().join("\n");
    fs::write(&even, fam(0)).unwrap();
    fs::write(&odd, fam(1)).unwrap();
    let (a, b) = (path(&dir, "a.txt"), path(&dir, "b.txt"));
    for (family, out) in [(&even, &a), (&odd, &b)] {
        let r = fanlab(&["build", "--variant", "1", "--family", family, "--depth", "1", "--breadth", "2", "--out", out]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    }
    let composite = path(&dir, "sum.txt");
    let out = fanlab(&["sum", "--input", &a, "--input", &b, "--out", &composite]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(fs::read_to_string(&composite).unwrap().starts_with("# fanlab sum v1"));

    // the same family twice repeats every order type
    let twice = fanlab(&["sum", "--input", &a, "--input", &a, "--out", &composite]);
    assert_eq!(code(&twice), 1);
}

#[test]
fn config_file_and_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "job.cfg");
    fs::write(&cfg, "variant = 3\ndepth = 3\nbreadth = 4\n").unwrap();
    let out = fanlab(&["classify", "--config", &cfg]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "CantorTimesNatLike");
    let out = fanlab(&["classify", "--config", &cfg, "--variant", "2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "IrrationalLike");
    fs::write(&cfg, "variant = 3\nshape = round\n").unwrap();
    assert_eq!(code(&fanlab(&["classify", "--config", &cfg])), 2);
}

#[test]
fn render_matches_golden_files() {
    let f1 = fanlab(&["render", "--mode", "intervals", "--depth", "2", "--breadth", "4"]);
    assert_eq!(String::from_utf8(f1.stdout).unwrap(), golden("figure1_d2_b4.svg"));
    let f2 = fanlab(&["render", "--mode", "fan", "--variant", "1", "--depth", "2", "--breadth", "4"]);
    assert_eq!(String::from_utf8(f2.stdout).unwrap(), golden("figure2_v1_d2_b4.svg"));
    assert_eq!(code(&fanlab(&["render", "--mode", "heatmap", "--depth", "2", "--breadth", "4"])), 2);
}

#[test]
fn render_fan_mode_geometry() {
    let svg = golden("figure2_v1_d2_b4.svg");
    // x_⟨0⟩ = 1/2 at height 1/3; x_∅ = 0 at height 1 (tallest)
    assert!(svg.contains(r#"x1="400" y1="380" x2="400" y2="260""#));
    assert!(svg.contains(r#"x1="20" y1="380" x2="20" y2="20""#));
    let tops: Vec<f64> = svg
        .lines()
        .filter(|l| l.contains(r#"y1="380""#) && !l.contains(r#"x2="780""#))
        .map(|l| l.split("y2=\"").nth(1).unwrap().split('"').next().unwrap().parse().unwrap())
        .collect();
    assert!(tops.iter().all(|&t| t >= 20.0));
}
