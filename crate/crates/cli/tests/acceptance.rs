//! Acceptance checks, one line per criterion:
//!
//! ```text
//! cargo test -p ocsvm-rules-cli --test acceptance -- --nocapture
//! ```

mod support;

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::io::Write;
use std::time::Instant;

use common::{gaussian_blob, gram, kkt_residual, matrix, objective, qp_oracle, rng, uniform_points};
use ocsvm_rules::dataset::{CategoricalState, Column, Dataset, FeatureEncoder};
use ocsvm_rules::ocsvm::{solve_dual, KernelParams, Label, OcsvmModel, SolverOptions};
use ocsvm_rules::rules::{
    extract_numeric_rules, extract_rules, prune_rules, Extraction, ExtractionConfig, Interval, RuleSet,
};
use ocsvm_rules::surrogate::{fit_tree, tree_to_rules};
use ocsvm_rules::Matrix;
use ocsvm_rules_cli::artifacts::{read_rules, read_tree};
use rand::Rng;
use support::*;
use tempfile::tempdir;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Fixture {
    name: &'static str,
    data: Dataset,
    categorical: Vec<String>,
    encoder: FeatureEncoder,
    model: OcsvmModel,
}

impl Fixture {
    fn new(name: &'static str, data: Dataset, numerical: &[&str], categorical: &[&str], gamma: f64) -> Self {
        let numerical: Vec<String> = numerical.iter().map(|s| s.to_string()).collect();
        let categorical: Vec<String> = categorical.iter().map(|s| s.to_string()).collect();
        let encoder = FeatureEncoder::fit(&data, &numerical, &categorical).unwrap();
        let x = encoder.encode(&data).unwrap();
        let model = OcsvmModel::fit(&x, 0.1, KernelParams::rbf(gamma).unwrap(), SolverOptions::default()).unwrap();
        Self {
            name,
            data,
            categorical,
            encoder,
            model,
        }
    }

    fn extract(&self, prune: bool) -> Extraction {
        let cfg = ExtractionConfig {
            prune,
            ..Default::default()
        };
        extract_rules(&self.data, &self.model, &self.encoder, &self.categorical, Label::NonAnomalous, &cfg).unwrap()
    }

    fn labels(&self) -> Vec<Label> {
        self.model.predict_all(&self.encoder.encode(&self.data).unwrap()).unwrap()
    }
}

fn two_d(name: &'static str, pts: &[[f64; 2]], gamma: f64) -> Fixture {
    let d = Dataset::new(vec![
        Column::numerical("a", pts.iter().map(|p| p[0]).collect()),
        Column::numerical("b", pts.iter().map(|p| p[1]).collect()),
    ])
    .unwrap();
    Fixture::new(name, d, &["a", "b"], &[], gamma)
}

fn fixtures() -> Vec<Fixture> {
    let mut out = vec![two_d("gaussian", &gaussian_blob(400, [0.0, 0.0], 1.0, 1), 0.1)];

    let mut pts = gaussian_blob(150, [0.0, 0.0], 1.0, 2);
    pts.extend(gaussian_blob(150, [5.0, 3.0], 0.5, 3));
    out.push(two_d("two-gaussians", &pts, 1.0));

    let seismic = ocsvm_rules::dataset::load_csv(
        repo_root().join("data/seismic.csv"),
        &ocsvm_rules::dataset::Schema::new(["gdenergy", "gdpuls"], []),
    )
    .unwrap();
    out.push(Fixture::new("seismic", seismic, &["gdenergy", "gdpuls"], &[], 0.1));

    let mut r = rng(4);
    let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..300 {
        let g = r.random_range(0..2usize);
        a.push(g as f64 * 3.0 + r.random::<f64>());
        b.push(r.random::<f64>() * 2.0 - g as f64);
        c.push(if g == 0 { "low" } else { "high" });
    }
    let mixed = Dataset::new(vec![Column::numerical("a", a), Column::numerical("b", b), Column::categorical("c", c)])
        .unwrap();
    out.push(Fixture::new("mixed", mixed, &["a", "b"], &["c"], 1.0));
    out
}

fn scaled_row(f: &Fixture, rs: &RuleSet, row: usize) -> (CategoricalState, Vec<f64>) {
    let state = f.data.state_of(row, &rs.categorical).unwrap();
    let x = rs
        .numerical
        .iter()
        .map(|n| f.encoder.scaling.get(n).unwrap().scale(f.data.numerical(n).unwrap()[row]))
        .collect();
    (state, x)
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let x = matrix(&gaussian_blob(500, [0.0, 0.0], 1.0, 500));
    let m = OcsvmModel::fit(&x, 0.1, KernelParams::rbf(0.1).unwrap(), SolverOptions::default())
        .map_err(|e| e.to_string())?;
    let anomalous = m.predict_all(&x).unwrap().iter().filter(|&&l| l == Label::Anomalous).count() as f64 / 500.0;
    let sv = m.n_support() as f64 / 500.0;
    let secs = start.elapsed().as_secs_f64();
    ensure((0.05..=0.15).contains(&anomalous), || format!("anomalous fraction {anomalous}"))?;
    ensure(sv >= 0.10, || format!("support-vector fraction {sv}"))?;
    ensure(secs < 5.0, || format!("took {secs:.2}s"))?;
    Ok(format!("anomalous {anomalous:.3}, SV {sv:.3}, {secs:.2}s"))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut r = rng(2024);
    let (mut worst_rel, mut worst_kkt) = (0.0f64, 0.0f64);
    for case in 0..50u64 {
        let n = r.random_range(2..=8);
        let x: Matrix = uniform_points(n, 2, 1000 + case);
        let nu = r.random_range(1.0 / n as f64..=1.0);
        let gamma = [0.1, 1.0, 10.0][case as usize % 3];
        let (_, oracle) = qp_oracle(&x, nu, gamma);
        let sol = solve_dual(&x, nu, KernelParams::rbf(gamma).unwrap(), SolverOptions::default())
            .map_err(|e| e.to_string())?;
        let f = objective(&gram(&x, gamma), &sol.alphas);
        worst_rel = worst_rel.max((f - oracle).abs() / oracle.abs());
        worst_kkt = worst_kkt.max(kkt_residual(&x, &sol.alphas, sol.rho, sol.upper_bound, gamma));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst_rel <= 1e-4, || format!("relative objective gap {worst_rel:.2e}"))?;
    ensure(worst_kkt <= 1e-3, || format!("KKT residual {worst_kkt:.2e}"))?;
    ensure(secs < 30.0, || format!("took {secs:.2}s"))?;
    Ok(format!("50 instances, max rel gap {worst_rel:.1e}, max KKT {worst_kkt:.1e}, {secs:.2}s"))
}

fn criterion_3(fx: &[Fixture]) -> Check {
    let mut total = 0;
    for f in fx {
        let ex = f.extract(true);
        let labels = f.labels();
        let (mut scaled_misses, mut original_misses) = (0, 0);
        for (row, l) in labels.iter().enumerate() {
            if *l == Label::NonAnomalous {
                let (state, x) = scaled_row(f, &ex.scaled, row);
                scaled_misses += usize::from(!ex.scaled.covers(&state, &x));
                original_misses += usize::from(!ex.rules.covers_row(&f.data, row).unwrap());
            }
        }
        let discarded = ex.scaled.discarded_points();
        ensure(scaled_misses == discarded && original_misses == discarded, || {
            format!(
                "{}: {scaled_misses} (scaled) / {original_misses} (original) uncovered vs {discarded} discarded",
                f.name
            )
        })?;
        total += ex.summary.covered_rows;
    }
    Ok(format!("{} fixtures, {total} non-discarded NA points all covered", fx.len()))
}

fn criterion_4(fx: &[Fixture]) -> Check {
    let mut anomalies = 0;
    for f in fx {
        let ex = f.extract(true);
        for (row, l) in f.labels().iter().enumerate() {
            if *l == Label::Anomalous {
                anomalies += 1;
                let (state, x) = scaled_row(f, &ex.scaled, row);
                ensure(!ex.scaled.covers(&state, &x) && !ex.rules.covers_row(&f.data, row).unwrap(), || {
                    format!("{}: anomalous row {row} inside a rule", f.name)
                })?;
            }
        }
    }
    Ok(format!("0 of {anomalies} anomalous points inside NA rules"))
}

/// Random boxes in the unit square, a third of them copies or shrunken
/// copies of earlier ones so that pruning has something to remove.
fn nested_rule_set(template: &RuleSet, seed: u64) -> RuleSet {
    let mut r = rng(seed);
    let mut rs = template.clone();
    rs.rules.truncate(1);
    let proto = rs.rules[0].clone();
    rs.rules.clear();
    for i in 0..60 {
        let mut rule = proto.clone();
        rule.bounds = if i > 0 && r.random::<f64>() < 0.35 {
            let base: &RuleSet = &rs;
            let src = &base.rules[r.random_range(0..base.rules.len())].bounds;
            src.iter()
                .map(|b| {
                    if r.random::<f64>() < 0.5 {
                        *b
                    } else {
                        let w = b.hi - b.lo;
                        Interval::new(b.lo + 0.25 * w * r.random::<f64>(), b.hi - 0.25 * w * r.random::<f64>())
                    }
                })
                .collect()
        } else {
            (0..rs.numerical.len())
                .map(|_| {
                    let (a, b) = (r.random::<f64>(), r.random::<f64>());
                    Interval::new(a.min(b), a.max(b))
                })
                .collect()
        };
        rs.rules.push(rule);
    }
    rs
}

fn criterion_5(fx: &[Fixture]) -> Check {
    const PROBES: usize = 10_000;
    let mut summary = Vec::new();
    let mut sets: Vec<(String, RuleSet)> = Vec::new();
    for (k, f) in fx.iter().enumerate() {
        let raw = f.extract(false).scaled;
        if k == 0 {
            sets.push(("nested".into(), nested_rule_set(&raw, 55)));
        }
        sets.push((f.name.to_string(), raw));
    }
    for (k, (name, raw)) in sets.iter().enumerate() {
        let pruned = prune_rules(raw);
        let mut states: Vec<CategoricalState> = Vec::new();
        for r in &raw.rules {
            if !states.contains(&r.state) {
                states.push(r.state.clone());
            }
        }
        let mut r = rng(77 + k as u64);
        let dim = raw.numerical.len();
        let mut mismatches = 0;
        for _ in 0..PROBES {
            let x: Vec<f64> = (0..dim).map(|_| r.random::<f64>() * 1.2 - 0.1).collect();
            for s in &states {
                mismatches += usize::from(raw.covers(s, &x) != pruned.covers(s, &x));
            }
        }
        ensure(mismatches == 0, || format!("{name}: {mismatches} mismatches"))?;
        summary.push(format!("{name} {}→{}", raw.len(), pruned.len()));
    }
    Ok(format!("{PROBES} probes per fixture, 0 mismatches ({})", summary.join(", ")))
}

fn criterion_6() -> Check {
    let dir = tempdir().unwrap();
    let start = Instant::now();
    let cfg = repo_root().join("data/seismic.json");
    let out = run(&["extract", "--config", s(&cfg), "--out", s(dir.path())]);
    let secs = start.elapsed().as_secs_f64();
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let na = read_rules(&dir.path().join("rules_na.json")).map_err(|e| e.to_string())?;
    let a = read_rules(&dir.path().join("rules_a.json")).map_err(|e| e.to_string())?;
    let (n_na, n_a) = (na.rule_set.len() as f64, a.rule_set.len() as f64);
    let rows = na.summary.target_rows + na.summary.other_rows;
    ensure(n_na > n_a, || format!("NA {n_na} not above A {n_a}"))?;
    ensure((89.0 / 3.0..=89.0 * 3.0).contains(&n_na), || format!("NA {n_na} outside 3x of 89"))?;
    ensure((25.0 / 3.0..=25.0 * 3.0).contains(&n_a), || format!("A {n_a} outside 3x of 25"))?;
    ensure(secs < 60.0, || format!("took {secs:.2}s"))?;
    Ok(format!("{rows} rows: NA {n_na} > A {n_a}, {secs:.2}s"))
}

fn criterion_7() -> Check {
    let xor = Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]], 2).unwrap();
    let y = [Label::NonAnomalous, Label::Anomalous, Label::Anomalous, Label::NonAnomalous];
    let t = fit_tree(&xor, &y, 42).map_err(|e| e.to_string())?;
    let (na, a) = tree_to_rules(&t);
    ensure(t.stats.depth == 2 && t.stats.leaves == 4, || format!("XOR tree {}", t.stats))?;
    ensure(na.len() == 2 && a.len() == 2, || format!("XOR rules {} / {}", na.len(), a.len()))?;
    ensure(t.accuracy(&xor, &y) == 1.0, || "XOR accuracy below 100%".into())?;

    for seed in 0..20u64 {
        let mut r = rng(seed);
        let n = r.random_range(5..80);
        let x = uniform_points(n, 3, seed);
        let y: Vec<Label> = (0..n)
            .map(|_| if r.random::<f64>() < 0.3 { Label::Anomalous } else { Label::NonAnomalous })
            .collect();
        let t = fit_tree(&x, &y, 42).map_err(|e| e.to_string())?;
        let (na, a) = tree_to_rules(&t);
        ensure(t.accuracy(&x, &y) == 1.0, || format!("seed {seed}: accuracy below 100%"))?;
        ensure(na.len() + a.len() == t.stats.leaves, || format!("seed {seed}: rules ≠ leaves"))?;
    }

    // Through the binary: the reported counts are the leaf counts.
    let dir = tempdir().unwrap();
    points_csv(&dir.path().join("d.csv"), &gaussian_blob(150, [0.0, 0.0], 1.0, 7));
    let cfg = xy_config(dir.path(), "d.csv");
    let stdout = run_ok(&["surrogate", "--config", s(&cfg)]);
    let tf = read_tree(&dir.path().join("out/tree.json")).map_err(|e| e.to_string())?;
    let (na, a) = tree_to_rules(&tf.tree);
    ensure(stdout.contains("Training accuracy = 100.00%"), || stdout.clone())?;
    ensure(tf.rule_counts.na == na.len() && tf.rule_counts.a == a.len(), || "tree.json counts drift".into())?;
    Ok(format!("XOR {}; 20 random fixtures at 100%", t.stats))
}

fn criterion_8() -> Check {
    let mut pts = gaussian_blob(20, [0.0, 0.0], 0.3, 81);
    pts.extend(gaussian_blob(20, [10.0, 10.0], 0.3, 82));
    for p in pts.iter_mut() {
        let c = if p[0] > 5.0 { 10.0 } else { 0.0 };
        let (dx, dy) = (p[0] - c, p[1] - c);
        let r = (dx * dx + dy * dy).sqrt();
        if r > 1.0 {
            *p = [c + dx / r, c + dy / r];
        }
    }
    let found = extract_numeric_rules(&matrix(&pts), &matrix(&[[5.0, 5.0]]), 4, &ExtractionConfig::default(), true)
        .map_err(|e| e.to_string())?;
    ensure(found.clusters == 2 && found.boxes.len() == 2, || {
        format!("{} clusters, {} boxes", found.clusters, found.boxes.len())
    })?;
    for b in &found.boxes {
        let members: Vec<[f64; 2]> = b.members.iter().map(|&i| pts[i]).collect();
        let direct: Vec<Interval> = (0..2)
            .map(|j| {
                Interval::new(
                    members.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min),
                    members.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max),
                )
            })
            .collect();
        ensure(b.bounds == direct, || format!("box {:?} vs direct {direct:?}", b.bounds))?;
    }
    Ok("2 clusters, 2 boxes equal to direct min/max".into())
}

fn criterion_9() -> Check {
    let root = tempdir().unwrap();
    let mut dirs = Vec::new();
    for name in ["first", "second"] {
        let dir = root.path().join(name);
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::copy(repo_root().join("data/seismic.csv"), dir.join("seismic.csv")).unwrap();
        let cfg = write_config(
            &dir,
            serde_json::json!({"name": "seismic", "dataset": "seismic.csv",
                "schema": {"numerical": ["gdenergy", "gdpuls"]}, "output_dir": "out"}),
        );
        run_ok(&["extract", "--config", s(&cfg)]);
        run_ok(&["surrogate", "--config", s(&cfg)]);
        run_ok(&["report", "--config", s(&cfg), "--out", s(&dir.join("out"))]);
        dirs.push(dir.join("out"));
    }
    let files = [
        "model.json",
        "rules_na.json",
        "rules_na.txt",
        "rules_na.scaled.json",
        "rules_a.json",
        "rules_a.txt",
        "rules_a.scaled.json",
        "tree.json",
        "report.json",
        "report.txt",
    ];
    for f in files {
        let (a, b) = (std::fs::read(dirs[0].join(f)), std::fs::read(dirs[1].join(f)));
        ensure(matches!((&a, &b), (Ok(x), Ok(y)) if x == y), || format!("{f} differs"))?;
    }
    Ok(format!("{} artifacts byte-identical across two runs", files.len()))
}

fn criterion_10() -> Check {
    let dir = tempdir().unwrap();
    let mut r = rng(10);
    let rows: Vec<Vec<String>> = (0..11)
        .map(|i| {
            let mut row: Vec<String> = (0..5).map(|_| format!("{:.4}", r.random::<f64>())).collect();
            row.push((i % 2).to_string());
            row.push((i % 3 == 0).to_string());
            row
        })
        .collect();
    write_csv(&dir.path().join("d.csv"), &["n0", "n1", "n2", "n3", "n4", "c0", "c1"], &rows);
    let cfg = write_config(
        dir.path(),
        serde_json::json!({"dataset": "d.csv",
            "schema": {"numerical": ["n0", "n1", "n2", "n3", "n4"], "categorical": ["c0", "c1"]},
            "output_dir": "out"}),
    );
    let out = run(&["extract", "--config", s(&cfg)]);
    let code = out.status.code();
    ensure(code == Some(3), || format!("exit code {code:?}"))?;
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).map_err(|e| e.to_string())?;
    ensure(err["kind"] == "insufficient_data", || err.to_string())?;
    Ok(format!("(2+1)·2^5 = {} > {} rows → exit 3", err["details"]["required"], err["details"]["available"]))
}

#[test]
fn acceptance() {
    let fx = fixtures();
    let results: Vec<(&str, Check)> = vec![
        ("nu-property", criterion_1()),
        ("solver oracle equivalence", criterion_2()),
        ("coverage invariant", criterion_3(&fx)),
        ("precision invariant", criterion_4(&fx)),
        ("pruning soundness", criterion_5(&fx)),
        ("NA vs A rule counts on seismic-like data", criterion_6()),
        ("surrogate correctness", criterion_7()),
        ("two-blob fixture", criterion_8()),
        ("determinism", criterion_9()),
        ("minimum-data gate", criterion_10()),
    ];
    // Written straight to stdout so the lines show up without --nocapture.
    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        let line = match r {
            Ok(detail) => format!("PASS {:>2} {name}: {detail}\n", i + 1),
            Err(why) => {
                failed += 1;
                format!("FAIL {:>2} {name}: {why}\n", i + 1)
            }
        };
        out.write_all(line.as_bytes()).unwrap();
    }
    out.flush().unwrap();
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
