//! End-to-end checks of the command-line interface.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_josephson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn census_reference_point() {
    let out = run(&["census", "--a", "0.5", "--b", "0.75", "--c", "-1"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("configuration (i, j): (1, 1)"), "{text}");
    assert!(text.contains("stable"));
    assert!(text.contains("region: S3"));
}

#[test]
fn census_physical_parameterization_matches_direct() {
    let direct = stdout(&run(&["census", "--a", "0.5", "--b", "0.75", "--c", "-1"]));
    let physical = stdout(&run(&[
        "census",
        "--alpha",
        "0.5",
        "--beta",
        "1.77777777778",
        "--gamma",
        "-1.33333333333",
    ]));
    let pick = |s: &str| {
        s.lines()
            .find(|l| l.starts_with("configuration"))
            .unwrap()
            .to_string()
    };
    assert_eq!(pick(&direct), pick(&physical));
}

#[test]
fn census_rejects_parameters_outside_domain() {
    let out = run(&["census", "--a", "-1", "--b", "1", "--c", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn census_requires_exactly_one_parameterization() {
    let out = run(&["census", "--a", "0.5", "--b", "0.75"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_row_count_header_and_determinism() {
    let args = [
        "scan", "--c", "-1", "--a", "0.2:0.8:4", "--b", "0.1:1.2:5",
    ];
    let out1 = run(&args);
    assert!(out1.status.success());
    let text1 = stdout(&out1);
    let lines: Vec<&str> = text1.lines().collect();
    assert_eq!(lines[0], "a,b,c,label,i,j,j_pos,j_neg,agreement,flags");
    assert_eq!(lines.len(), 1 + 4 * 5);

    let out2 = run(&args);
    assert_eq!(text1, stdout(&out2), "reruns must be byte-identical");
}

#[test]
fn scan_singleton_grid() {
    let out = run(&["scan", "--c", "-1", "--a", "0.5:0.5:1", "--b", "0.75:0.75:1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("0.5,0.75,-1,S3,1,1,1,0,true"));
}

#[test]
fn scan_json_and_csv_carry_identical_values() {
    let a = ["scan", "--c", "-1", "--a", "0.3:0.7:3", "--b", "0.2:1:3"];
    let csv = stdout(&run(&a));
    let json = stdout(&run(&[&a[..], &["--format", "json"]].concat()));

    let csv_rows: Vec<Vec<String>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    // pull the same fields out of the hand-rolled json
    let json_rows: Vec<Vec<String>> = json
        .lines()
        .filter(|l| l.trim_start().starts_with('{'))
        .map(|l| {
            let grab = |key: &str| {
                let pat = format!("\"{key}\": ");
                let start = l.find(&pat).unwrap() + pat.len();
                let rest = &l[start..];
                let end = rest
                    .char_indices()
                    .find(|(_, c)| *c == ',' || *c == '}')
                    .map(|(i, _)| i)
                    .unwrap();
                rest[..end].trim_matches('"').to_string()
            };
            vec![
                grab("a"),
                grab("b"),
                grab("c"),
                grab("label"),
                grab("i"),
                grab("j"),
                grab("j_pos"),
                grab("j_neg"),
                grab("agreement"),
                grab("flags"),
            ]
        })
        .collect();

    assert_eq!(csv_rows.len(), json_rows.len());
    for (c_row, j_row) in csv_rows.iter().zip(&json_rows) {
        for (idx, (cv, jv)) in c_row.iter().zip(j_row).enumerate() {
            let same = cv == jv || (cv == "na" && jv == "null");
            assert!(same, "field {idx}: csv '{cv}' vs json '{jv}'");
        }
    }
}

#[test]
fn curve_homoclinic_footer_matches_leading_order() {
    let out = run(&["curve", "phi", "--c", "-0.1", "--a", "0.99:0.99:1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("curve,a,c,b,gap_tol,found"));
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("phi,0.99,-0.1,"));
    let b: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((b - 0.0101).abs() / 0.0101 < 0.25, "phi = {b}");
    assert!(text.contains("# a_star"), "constants footer expected:\n{text}");

    let rerun = stdout(&run(&["curve", "phi", "--c", "-0.1", "--a", "0.99:0.99:1"]));
    assert_eq!(text, rerun);
}

#[test]
fn curve_rejects_positive_c_for_homoclinic() {
    let out = run(&["curve", "phi", "--c", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_stability_reports() {
    let text = stdout(&run(&["zero-stability", "--a", "0.5", "--b", "0", "--c", "0"]));
    assert!(text.contains("G3 = -3.14159265359"));
    assert!(text.contains("upper stable, lower stable"));

    let text = stdout(&run(&["zero-stability", "--a", "0.5", "--b", "0.75", "--c", "-1"]));
    assert!(text.contains("upper unstable, lower stable"));

    let json = stdout(&run(&[
        "zero-stability", "--a", "0", "--b", "1", "--c", "0", "--format", "json",
    ]));
    assert!(json.contains("\"G2\": 6.28318530718"));
}

#[test]
fn example41_reproduces_reference() {
    let out = run(&["example41"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("reference reproduction: ok"));
}

#[test]
fn output_file_writing() {
    let dir = std::env::temp_dir().join("josephson-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("single.csv");
    let out = run(&[
        "scan", "--c", "-1", "--a", "0.5:0.5:1", "--b", "0.75:0.75:1",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let content = std::fs::read_to_string(&path).unwrap();
    assert!(content.starts_with("a,b,c,label"));
    std::fs::remove_file(&path).ok();
}
