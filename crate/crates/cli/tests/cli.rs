use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn proxemb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proxemb"))
        .args(args)
        .output()
        .expect("failed to launch proxemb")
}

fn ok(args: &[&str]) -> String {
    let out = proxemb(args);
    assert!(
        out.status.success(),
        "proxemb {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// House graph (5 shapes on a 30-cycle) written into `dir`.
fn house(dir: &Path) -> (PathBuf, PathBuf) {
    let prefix = dir.join("house");
    ok(&["synth", "--shape", "house", "--n-shapes", "5", "--cycle-len", "30", "--out", p(&prefix)]);
    (dir.join("house.edgelist"), dir.join("house.roles"))
}

struct Csv {
    meta: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_csv(path: &Path) -> Csv {
    let text = fs::read_to_string(path).unwrap();
    let (meta, rest): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#'));
    Csv {
        meta: meta.into_iter().map(str::to_owned).collect(),
        header: rest[0].split(',').map(str::to_owned).collect(),
        rows: rest[1..]
            .iter()
            .map(|l| l.split(',').map(str::to_owned).collect())
            .collect(),
    }
}

fn metric(stdout: &str, name: &str) -> f64 {
    stdout
        .lines()
        .find_map(|l| {
            let mut parts = l.split_whitespace();
            (parts.next() == Some(name)).then(|| parts.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("metric {name} missing from:\n{stdout}"))
}

#[test]
fn graphwave_on_house_gives_55_rows_of_50() {
    let dir = TempDir::new().unwrap();
    let (graph, _) = house(dir.path());
    let out = dir.path().join("emb.csv");
    ok(&["node-embed", "--graph", p(&graph), "--preset", "graphwave", "--out", p(&out)]);
    let csv = read_csv(&out);
    assert_eq!(csv.rows.len(), 55);
    assert_eq!(csv.header.len(), 51);
    assert!(csv.rows.iter().all(|r| r.len() == 51));
    assert!(csv.meta.contains(&"# proximity.name = hk".to_string()));
}

#[test]
fn netmf_on_three_node_path_clamps_dimension() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("path.edgelist");
    fs::write(&graph, "a b\nb c\n").unwrap();
    let out = dir.path().join("emb.csv");
    let run = proxemb(&["node-embed", "--graph", p(&graph), "--preset", "netmf", "--out", p(&out)]);
    assert!(run.status.success());
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("exceeds node count 3"), "no warning in {stderr:?}");
    let csv = read_csv(&out);
    assert_eq!(csv.header, ["node", "y0", "y1", "y2"]);
    assert_eq!(csv.rows.len(), 3);
    assert_eq!(csv.rows[0][0], "a");
    assert!(csv.meta.contains(&"# output.clamped_from = 128".to_string()));
    assert!(csv.meta.contains(&"# embedding.dim = 3".to_string()));
}

#[test]
fn exit_codes_distinguish_failure_kinds() {
    let dir = TempDir::new().unwrap();
    let (graph, _) = house(dir.path());
    let out = dir.path().join("x.csv");
    let code = |args: &[&str]| proxemb(args).status.code().unwrap();

    assert_eq!(code(&["node-embed", "--graph", p(&graph), "--proximity", "bogus", "--embedding", "cfs", "--out", p(&out)]), 1);
    assert_eq!(code(&["node-embed", "--graph", p(&graph), "--out", p(&out)]), 1);
    assert_eq!(code(&["node-embed", "--graph", p(&graph), "--preset", "netmf", "--set", "embedding.dim=3", "--set", "embedding.name=cfs", "--out", p(&out)]), 1);
    assert_eq!(code(&["node-embed", "--graph", "missing.edgelist", "--preset", "netmf", "--out", p(&out)]), 2);
    assert_eq!(
        code(&["node-embed", "--graph", p(&graph), "--proximity", "ppr", "--embedding", "cfs", "--set", "proximity.beta=0.9", "--out", p(&out)]),
        3
    );
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
}

#[test]
fn header_config_reproduces_the_output() {
    let dir = TempDir::new().unwrap();
    let (graph, _) = house(dir.path());
    let first = dir.path().join("first.csv");
    ok(&[
        "node-embed", "--graph", p(&graph), "--proximity", "ppr", "--nonlinearity", "bin:50",
        "--embedding", "cfs", "--dim", "20", "--set", "proximity.normalized=true", "--out", p(&first),
    ]);
    let config: String = read_csv(&first)
        .meta
        .iter()
        .filter(|l| !l.starts_with("# output."))
        .map(|l| format!("{}\n", &l[2..]))
        .collect();
    let config_path = dir.path().join("echo.conf");
    fs::write(&config_path, config).unwrap();
    let second = dir.path().join("second.csv");
    ok(&["node-embed", "--graph", p(&graph), "--config", p(&config_path), "--out", p(&second)]);
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (graph, roles) = house(dir.path());
    let run = |tag: &str| -> Vec<Vec<u8>> {
        let emb = dir.path().join(format!("emb_{tag}.csv"));
        let sweep = dir.path().join(format!("sweep_{tag}.csv"));
        let diag = dir.path().join(format!("diag_{tag}"));
        ok(&["node-embed", "--graph", p(&graph), "--preset", "netmf", "--set", "embedding.dim=16", "--out", p(&emb)]);
        ok(&[
            "sweep", "--task", "node-classify", "--graph", p(&graph), "--labels", p(&roles),
            "--order", "2", "--proximity", "adj", "--trials", "2", "--out", p(&sweep),
        ]);
        ok(&["diagnose", "--graph", p(&graph), "--ops", "fabp,rw", "--out-dir", p(&diag)]);
        let mut files = vec![fs::read(&emb).unwrap(), fs::read(&sweep).unwrap()];
        let mut names: Vec<_> = fs::read_dir(&diag).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        files.extend(names.iter().map(|n| fs::read(n).unwrap()));
        files
    };
    assert_eq!(run("a"), run("b"));
}

/// Average ranks (1 = best, ties averaged) recomputed from the emitted
/// per-repetition scores.
fn recompute_ranks(scores: &[Vec<f64>]) -> Vec<f64> {
    let reps = scores[0].len();
    let mut sums = vec![0.0; scores.len()];
    for b in 0..reps {
        for (i, row) in scores.iter().enumerate() {
            let better = scores.iter().filter(|r| r[b] > row[b]).count() as f64;
            let equal = scores.iter().filter(|r| r[b] == row[b]).count() as f64;
            sums[i] += better + (equal + 1.0) / 2.0;
        }
    }
    sums.iter().map(|s| s / reps as f64).collect()
}

#[test]
fn grid_sweep_emits_35_ranked_rows() {
    let dir = TempDir::new().unwrap();
    let (graph, roles) = house(dir.path());
    let out = dir.path().join("sweep.csv");
    let stdout = ok(&[
        "sweep", "--task", "node-classify", "--graph", p(&graph), "--labels", p(&roles),
        "--dim", "10", "--trials", "3", "--out", p(&out),
    ]);
    assert!(stdout.contains("runtime"));
    let csv = read_csv(&out);
    assert_eq!(csv.rows.len(), 35);
    assert_eq!(&csv.header[..5], ["proximity", "nonlinearity", "avg_rank", "avg_accuracy", "max_accuracy"]);
    assert_eq!(csv.rows[0][..2], ["ppmi", "identity"]);
    assert_eq!(csv.rows[34][..2], ["rw", "bin:95"]);

    let num = |s: &String| s.parse::<f64>().unwrap();
    let scores: Vec<Vec<f64>> = csv.rows.iter().map(|r| r[5..].iter().map(num).collect()).collect();
    let expected = recompute_ranks(&scores);
    for (row, rank) in csv.rows.iter().zip(expected) {
        assert!((num(&row[2]) - rank).abs() < 1e-9, "{row:?} expected rank {rank}");
    }
    // Ranks over 35 designs always average to 18.
    let mean_rank: f64 = csv.rows.iter().map(|r| num(&r[2])).sum::<f64>() / 35.0;
    assert!((mean_rank - 18.0).abs() < 1e-9);
}

#[test]
fn order_sweep_emits_one_row_per_order() {
    let dir = TempDir::new().unwrap();
    let (graph, roles) = house(dir.path());
    let out = dir.path().join("order.csv");
    ok(&[
        "sweep", "--task", "node-cluster", "--graph", p(&graph), "--labels", p(&roles),
        "--order", "5", "--proximity", "rw", "--out", p(&out),
    ]);
    let csv = read_csv(&out);
    let names: Vec<&str> = csv.rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["rw:1-1", "rw:1-2", "rw:1-3", "rw:1-4", "rw:1-5"]);
    let code = proxemb(&[
        "sweep", "--task", "node-cluster", "--graph", p(&graph), "--labels", p(&roles),
        "--order", "3", "--proximity", "hk", "--out", p(&out),
    ])
    .status
    .code();
    assert_eq!(code, Some(1));
}

#[test]
fn diagnose_writes_row_stats_for_every_pair() {
    let dir = TempDir::new().unwrap();
    let (graph, _) = house(dir.path());
    let out = dir.path().join("diag");
    ok(&["diagnose", "--graph", p(&graph), "--out-dir", p(&out), "--bins", "8"]);
    assert_eq!(fs::read_dir(&out).unwrap().count(), 70);

    // Random-walk and heat-kernel rows are distributions.
    for name in ["rw_identity_rows.csv", "hk_identity_rows.csv"] {
        let csv = read_csv(&out.join(name));
        assert_eq!(csv.header, ["node", "sum", "variance", "entropy", "degenerate"]);
        assert_eq!(csv.rows.len(), 55);
        for row in &csv.rows {
            assert!((row[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-10, "{name}: {row:?}");
        }
    }
    let hist = read_csv(&out.join("ppmi_bin5_hist.csv"));
    assert_eq!(hist.header, ["lo", "hi", "count"]);
    assert_eq!(hist.rows.len(), 8);
    let total: usize = hist.rows.iter().map(|r| r[2].parse::<usize>().unwrap()).sum();
    assert_eq!(total, 55);
}

#[test]
fn diagnose_path_graph_row_sums_match_hand_count() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("path.edgelist");
    fs::write(&graph, "0 1\n1 2\n2 3\n").unwrap();
    let out = dir.path().join("diag");
    ok(&["diagnose", "--graph", p(&graph), "--ops", "adj", "--filters", "identity", "--kind", "positional", "--out-dir", p(&out)]);
    let csv = read_csv(&out.join("adj_identity_rows.csv"));
    // A^2 of the path P4: rows [1,0,1,0], [0,2,0,1], [1,0,2,0], [0,1,0,1].
    let sums: Vec<&str> = csv.rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(sums, ["2.0", "3.0", "3.0", "2.0"]);
    assert!(csv.rows.iter().all(|r| r[4] == "false"));
}

fn write_table(path: &Path, rows: &[Vec<f64>]) {
    let width = rows[0].len();
    let mut text = String::from("id");
    for j in 0..width {
        text.push_str(&format!(",x{j}"));
    }
    text.push('\n');
    for (i, r) in rows.iter().enumerate() {
        text.push_str(&format!("n{i}"));
        for x in r {
            text.push_str(&format!(",{x}"));
        }
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

fn write_label_file(path: &Path, labels: &[usize]) {
    let text: String = labels.iter().enumerate().map(|(i, l)| format!("n{i} {l}\n")).collect();
    fs::write(path, text).unwrap();
}

#[test]
fn eval_separates_blobs() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let labels: Vec<usize> = (0..120).map(|i| i % 3).collect();
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|&l| (0..4).map(|j| if j == l { 6.0 } else { 0.0 } + rng.random_range(-1.0..1.0)).collect())
        .collect();
    let table = dir.path().join("blobs.csv");
    let label_path = dir.path().join("labels.txt");
    write_table(&table, &rows);
    write_label_file(&label_path, &labels);
    let json = dir.path().join("report.json");
    let stdout = ok(&[
        "eval", "--task", "node-classify", "--input", p(&table), "--labels", p(&label_path), "--json", p(&json),
    ]);
    assert!(metric(&stdout, "micro_f1") >= 0.95, "{stdout}");
    let report = fs::read_to_string(&json).unwrap();
    assert!(report.contains("\"task\": \"node-classify\""));

    let stdout = ok(&["eval", "--task", "node-cluster", "--input", p(&table), "--labels", p(&label_path)]);
    assert!(metric(&stdout, "homogeneity") > 0.99, "{stdout}");
}

#[test]
fn eval_on_noise_features_is_at_chance() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let labels: Vec<usize> = (0..200).map(|i| i % 2).collect();
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let table = dir.path().join("noise.csv");
    let label_path = dir.path().join("labels.txt");
    write_table(&table, &rows);
    write_label_file(&label_path, &labels);
    let seeds = 8;
    let mean: f64 = (0..seeds)
        .map(|s| {
            let seed = s.to_string();
            let stdout = ok(&[
                "eval", "--task", "node-classify", "--input", p(&table), "--labels", p(&label_path), "--eval-seed", &seed,
            ]);
            metric(&stdout, "micro_f1")
        })
        .sum::<f64>()
        / seeds as f64;
    assert!((mean - 0.5).abs() <= 0.1, "mean micro-F1 {mean}");
}

#[test]
fn graph_pipeline_classifies_two_families() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("families");
    ok(&["synth", "--families", "20", "--seed", "5", "--out", p(&data)]);
    let features = dir.path().join("features.csv");
    ok(&[
        "graph-embed", "--dataset", p(&data), "--proximity", "rw", "--embedding", "cfs", "--dim", "10",
        "--scales", "1,2,3,4,5", "--baselines", "--out", p(&features),
    ]);
    let csv = read_csv(&features);
    assert_eq!(csv.rows.len(), 40);
    assert_eq!(csv.header.len(), 1 + 50 + 5 + 5);
    assert_eq!(csv.header[51], "netlsd_0");
    assert_eq!(csv.header[60], "retgk_5");

    let stdout = ok(&[
        "eval", "--task", "graph-classify", "--dataset", p(&data), "--proximity", "rw", "--embedding", "cfs",
        "--dim", "10", "--scales", "1,2,3,4,5", "--folds", "5", "--trials", "2",
    ]);
    assert!(metric(&stdout, "accuracy_mean") >= 0.9, "{stdout}");
    let stdout = ok(&[
        "eval", "--task", "graph-classify", "--input", p(&features), "--labels", p(&data.join("labels.txt")),
        "--folds", "5", "--trials", "2",
    ]);
    assert!(metric(&stdout, "accuracy_mean") >= 0.9, "{stdout}");
}
