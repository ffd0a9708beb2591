use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;
use tradenet::{Kind, Mode, Strategy};
use tradenet_cli::{
    cmd_correlate, cmd_criticality, cmd_efficiency, cmd_robustness, cmd_volumes, Artifact, CommandName, Format,
    RunConfig,
};

fn fixture(dir: &Path, name: &str, rows: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut body = String::from("year,exporter,importer,volume\n");
    for r in rows {
        body.push_str(r);
        body.push('\n');
    }
    fs::write(&path, body).unwrap();
    path
}

/// Data rows of a CSV artifact (config comment and header stripped).
fn rows(a: &Artifact) -> Vec<Vec<String>> {
    a.contents
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn find<'a>(artifacts: &'a [Artifact], name: &str) -> &'a Artifact {
    artifacts.iter().find(|a| a.file_name == name).unwrap_or_else(|| {
        panic!(
            "no {name} among {:?}",
            artifacts.iter().map(|a| &a.file_name).collect::<Vec<_>>()
        )
    })
}

fn close(cell: &str, expected: f64) {
    let x: f64 = cell.parse().unwrap();
    assert!((x - expected).abs() < 1e-12, "{x} vs {expected}");
}

#[test]
fn efficiency_row_for_path() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "path.csv", &["2017,A,B,2", "2017,B,C,2"]);
    let out = cmd_efficiency(&RunConfig::new(CommandName::Efficiency, input)).unwrap();
    assert!(out.warnings.is_empty());
    let a = &out.artifacts[0];
    assert_eq!(a.file_name, "efficiency.csv");
    assert_eq!(a.contents.lines().nth(1).unwrap(), "year,N,N_e,V,E_A,E_W,E_Wbar");
    let r = &rows(a)[0];
    assert_eq!(&r[..4], ["2017", "3", "2", "4"]);
    close(&r[4], 5.0 / 12.0);
    close(&r[5], 5.0 / 6.0);
    close(&r[6], 5.0 / 12.0);
}

#[test]
fn empty_year_filter_warns() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "path.csv", &["2017,A,B,2", "2017,B,C,2"]);
    let mut config = RunConfig::new(CommandName::Efficiency, input);
    config.years = Some(vec![1990]);
    let out = cmd_efficiency(&config).unwrap();
    assert!(rows(&out.artifacts[0]).is_empty());
    assert_eq!(out.warnings.len(), 1);
}

#[test]
fn missing_file_is_a_data_error() {
    let err = cmd_efficiency(&RunConfig::new(CommandName::Efficiency, "/nonexistent/x.csv")).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("/nonexistent/x.csv"));
}

#[test]
fn malformed_row_reports_line() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "bad.csv", &["2017,A,B,2", "2017,B,C,lots"]);
    let err = cmd_efficiency(&RunConfig::new(CommandName::Efficiency, &input)).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("line 3"), "{err}");

    let mut config = RunConfig::new(CommandName::Efficiency, input);
    config.lenient = true;
    let out = cmd_efficiency(&config).unwrap();
    assert_eq!(out.warnings.len(), 1);
    assert_eq!(rows(&out.artifacts[0])[0][1], "2");
}

#[test]
fn out_star_center_ranks_first() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "star.csv", &["2017,A,B,1", "2017,A,C,1", "2017,A,D,1"]);
    let mut config = RunConfig::new(CommandName::Criticality, input);
    config.modes = vec![Mode::Unweighted];
    let out = cmd_criticality(&config).unwrap();
    let full = rows(find(&out.artifacts, "criticality-node_2017_unweighted.csv"));
    assert_eq!(full[0][0], "A");
    close(&full[0][1], 1.0);
    assert_eq!(full[0][2], "1");
    close(&full[2][1], -1.0 / 3.0);
}

#[test]
fn path_edges_tie_broken_by_key() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "path.csv", &["2017,A,B,2", "2017,B,C,2"]);
    let mut config = RunConfig::new(CommandName::Criticality, input);
    config.kind = Kind::Edge;
    let out = cmd_criticality(&config).unwrap();
    let full = rows(find(&out.artifacts, "criticality-edge_2017_unweighted.csv"));
    assert_eq!(full.len(), 2);
    assert_eq!((full[0][0].as_str(), full[1][0].as_str()), ("A->B", "B->C"));
    close(&full[0][1], 0.6);
    close(&full[1][1], 0.6);
    assert!(out
        .artifacts
        .iter()
        .any(|a| a.file_name == "criticality-edge_table_weighted.csv"));
}

#[test]
fn group_sums_file() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "star.csv", &["2017,A,B,1", "2017,A,C,1"]);
    let groups = dir.path().join("groups.csv");
    fs::write(&groups, "economy,group\nA,core\nB,rim\nC,rim\n").unwrap();
    let mut config = RunConfig::new(CommandName::Criticality, input);
    config.modes = vec![Mode::Unweighted];
    config.groups = Some(groups);
    let out = cmd_criticality(&config).unwrap();
    let g = rows(find(&out.artifacts, "criticality-groups_2017_unweighted.csv"));
    assert_eq!(g[0][0], "core");
    close(&g[0][1], 1.0);
    assert_eq!(g[1][0], "rim");
    // each leaf of a two-leaf star scores -1/2
    close(&g[1][1], -1.0);
}

#[test]
fn degenerate_year_does_not_abort() {
    let dir = TempDir::new().unwrap();
    // 2017 has only two economies, too few for node removal
    let input = fixture(dir.path(), "two.csv", &["2016,A,B,1", "2016,B,C,1", "2017,A,B,1"]);
    let mut config = RunConfig::new(CommandName::Criticality, input);
    config.modes = vec![Mode::Unweighted];
    let out = cmd_criticality(&config).unwrap();
    assert!(out
        .artifacts
        .iter()
        .any(|a| a.file_name == "criticality-node_2016_unweighted.csv"));
    assert!(!out
        .artifacts
        .iter()
        .any(|a| a.file_name == "criticality-node_2017_unweighted.csv"));
    assert!(out.warnings.iter().any(|w| w.starts_with("2017")));
    let layout = find(&out.artifacts, "criticality-node_table_unweighted.csv");
    assert_eq!(layout.contents.lines().nth(1).unwrap(), "rank,2016,2017");
}

#[test]
fn economy_relationships() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "path.csv", &["2017,A,B,2", "2017,B,C,2", "2017,C,A,5"]);
    let mut config = RunConfig::new(CommandName::Criticality, input);
    config.kind = Kind::Edge;
    config.modes = vec![Mode::Weighted];
    config.economies = vec!["A".into(), "Q".into()];
    config.top = 1;
    let out = cmd_criticality(&config).unwrap();
    let e = rows(find(&out.artifacts, "criticality-economy_2017_weighted.csv"));
    assert_eq!(e.len(), 1);
    assert_eq!(e[0][0], "A");
    assert!(out.warnings.iter().any(|w| w.contains("`Q`")));
}

#[test]
fn k3_robustness_curves() {
    let dir = TempDir::new().unwrap();
    let k3: Vec<String> = ["A", "B", "C"]
        .iter()
        .flat_map(|a| {
            ["A", "B", "C"]
                .iter()
                .filter(move |b| a != *b)
                .map(move |b| format!("2017,{a},{b},1"))
        })
        .collect();
    let k3: Vec<&str> = k3.iter().map(String::as_str).collect();
    let input = fixture(dir.path(), "k3.csv", &k3);
    let mut config = RunConfig::new(CommandName::Robustness, input);
    config.modes = vec![Mode::Unweighted];
    config.strategies = vec![Strategy::Random, Strategy::Criticality];
    config.p_grid = vec![0.0, 1.0 / 3.0];
    let out = cmd_robustness(&config).unwrap();
    assert_eq!(out.artifacts.len(), 2);
    for name in [
        "robustness-node_2017_unweighted_random.csv",
        "robustness-node_2017_unweighted_criticality.csv",
    ] {
        let r = rows(find(&out.artifacts, name));
        assert_eq!(r[0][2], "1");
        close(&r[1][2], 1.0);
        assert_eq!(r[1][1], "1");
    }
}

#[test]
fn path_value_attack() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "path.csv", &["2017,A,B,3", "2017,B,C,2"]);
    let mut config = RunConfig::new(CommandName::Robustness, input);
    config.kind = Kind::Edge;
    config.modes = vec![Mode::Unweighted];
    config.strategies = vec![Strategy::Value];
    config.p_grid = vec![0.0, 0.5, 1.0];
    let out = cmd_robustness(&config).unwrap();
    let r = rows(&out.artifacts[0]);
    // A->B goes first, leaving only B->C: E = 1/6 against 5/12
    close(&r[1][2], 0.4);
    close(&r[2][2], 0.0);
    assert_eq!(r[0][3], "");
}

#[test]
fn correlate_reports() {
    let dir = TempDir::new().unwrap();
    let input = fixture(
        dir.path(),
        "c.csv",
        &[
            "2016,A,B,1",
            "2016,A,C,1",
            "2017,A,B,1",
            "2017,B,C,1",
            "2017,C,A,1",
            "2017,A,C,1",
        ],
    );
    let mut config = RunConfig::new(CommandName::Correlate, input);
    config.modes = vec![Mode::Unweighted];
    let out = cmd_correlate(&config).unwrap();
    assert_eq!(out.artifacts.len(), 2);
    let r2016 = rows(find(&out.artifacts, "correlate_2016_unweighted.csv"));
    assert_eq!(r2016.len(), 2);
    // import volumes are 0,1,1 against criticality 1,-1/3,-1/3: perfectly anti-monotone
    close(&r2016[0][6], -1.0);
    // the export side is 2,0,0 against the same: perfectly monotone
    close(&r2016[1][6], 1.0);
    let r2017 = rows(find(&out.artifacts, "correlate_2017_unweighted.csv"));
    assert_eq!(r2017.len(), 2);
    assert!(r2017.iter().all(|r| r[0] == "2017" && r[3] == "3"));
}

#[test]
fn constant_volume_gives_zero_variance_note() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "ring.csv", &["2017,A,B,1", "2017,B,C,1", "2017,C,A,1"]);
    let mut config = RunConfig::new(CommandName::Correlate, input);
    config.modes = vec![Mode::Unweighted];
    let out = cmd_correlate(&config).unwrap();
    let r = rows(&out.artifacts[0]);
    assert_eq!(r.len(), 2);
    assert!(r.iter().all(|row| row[4].is_empty() && !row[8].is_empty()));
    assert_eq!(out.warnings.len(), 2);
}

#[test]
fn volumes_long_format() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "v.csv", &["2016,A,B,5", "2017,A,B,1", "2017,C,B,7"]);
    let mut config = RunConfig::new(CommandName::Volumes, input);
    config.top = 1;
    let out = cmd_volumes(&config).unwrap();
    let r = rows(&out.artifacts[0]);
    assert_eq!(r[0], ["import", "1", "B", "2016", "5"]);
    assert_eq!(r[1], ["import", "1", "B", "2017", "8"]);
    assert_eq!(r[2][..3], ["export", "1", "C"]);
    assert_eq!(r[3][4], "7");
}

#[test]
fn csv_and_json_carry_the_same_values() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "path.csv", &["2017,A,B,2", "2017,B,C,2"]);
    let csv_config = RunConfig::new(CommandName::Efficiency, input);
    let mut json_config = csv_config.clone();
    json_config.format = Format::Json;
    let csv = &cmd_efficiency(&csv_config).unwrap().artifacts[0];
    let json = &cmd_efficiency(&json_config).unwrap().artifacts[0];
    let doc: serde_json::Value = serde_json::from_str(&json.contents).unwrap();
    let header: Vec<&str> = csv.contents.lines().nth(1).unwrap().split(',').collect();
    for (col, cell) in header.iter().zip(&rows(csv)[0]) {
        let v = &doc["results"][0][*col];
        assert_eq!(v.as_f64().unwrap(), cell.parse::<f64>().unwrap(), "{col}");
    }
}

fn analyze(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_analyze")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes_and_files() {
    let dir = TempDir::new().unwrap();
    let input = fixture(dir.path(), "path.csv", &["2017,A,B,2", "2017,B,C,2"]);
    let out_dir = dir.path().join("out");
    let (input, out_dir) = (input.to_str().unwrap(), out_dir.to_str().unwrap());

    let ok = analyze(&["efficiency", "--input", input, "--out-dir", out_dir]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let stderr = String::from_utf8_lossy(&ok.stderr);
    assert!(stderr.contains("\"seed\":42") && stderr.contains("\"samples\":200"));
    let written = fs::read_to_string(Path::new(out_dir).join("efficiency.csv")).unwrap();
    assert!(written.starts_with("# config: {\"command\":\"efficiency\""));

    assert_eq!(
        analyze(&["efficiency", "--input", "/nonexistent.csv"]).status.code(),
        Some(2)
    );
    assert_eq!(analyze(&["efficiency"]).status.code(), Some(1));
    assert_eq!(
        analyze(&["efficiency", "--input", input, "--mode", "fast"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        analyze(&["robustness", "--input", input, "--kind", "edge", "--strategies", "in"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(analyze(&["--help"]).status.code(), Some(0));
}

#[test]
fn binary_output_is_reproducible_from_embedded_config() {
    let dir = TempDir::new().unwrap();
    let input = fixture(
        dir.path(),
        "k.csv",
        &["2017,A,B,2", "2017,B,C,2", "2017,C,A,4", "2017,A,D,1"],
    );
    let input = input.to_str().unwrap();
    let out_dir = dir.path().join("out");
    let run = |threads: &str| {
        let _ = fs::remove_dir_all(&out_dir);
        let st = analyze(&[
            "robustness",
            "--input",
            input,
            "--out-dir",
            out_dir.to_str().unwrap(),
            "--threads",
            threads,
            "--p-grid",
            "0:1:0.25",
            "--samples",
            "3",
        ]);
        assert_eq!(st.status.code(), Some(0));
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    let a = run("1");
    let b = run("3");
    assert_eq!(a.len(), 8);
    assert_eq!(a, b);
}
