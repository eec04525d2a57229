//! Acceptance suite: one PASS/FAIL line per criterion, then a single verdict.
//!
//! Run with `cargo test -p polluter --test acceptance -- --nocapture` to see
//! the lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use polluter::core::diversity::{classify_url, gini, DiversityThresholds, DiversityTriple, UrlDiversityTable};
use polluter::core::eval::{account_status_report, AccountStatus};
use polluter::core::graph::{project, BipartiteGraph, CoTweetMultigraph, DayKey};
use polluter::core::louvain::louvain;
use polluter::core::stats::{binomial_significance, welch_t_test};
use polluter::core::{City, Day};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, started: Instant) -> Result<Duration, String> {
    let took = started.elapsed();
    check(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

// Gini

fn double_sum_gini(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let total: f64 = x.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for a in x {
        for b in x {
            s += (a - b).abs();
        }
    }
    s / (2.0 * n * total)
}

fn gini_oracle() -> Outcome {
    let started = Instant::now();
    let mut checked = 0u64;
    let mut list = Vec::with_capacity(8);
    for len in 1..=8u32 {
        for code in 0..6u64.pow(len) {
            list.clear();
            let mut c = code;
            for _ in 0..len {
                list.push((c % 6) as f64);
                c /= 6;
            }
            let got = gini(&list).map_err(|e| e.to_string())?;
            let want = double_sum_gini(&list);
            check((got - want).abs() <= 1e-12, || format!("{list:?}: {got} vs {want}"))?;
            checked += 1;
        }
    }
    let took = within(Duration::from_secs(10), started)?;
    Ok(format!("{checked} lists in {took:.2?}"))
}

fn table(scores: &[u64]) -> UrlDiversityTable {
    // user i posts the URL once plus `score` other links
    let users: BTreeMap<String, DiversityTriple> =
        scores.iter().enumerate().map(|(i, &s)| (format!("u{i:03}"), DiversityTriple::new(s + 1, 1))).collect();
    UrlDiversityTable { url: "example.com/a".into(), users }
}

fn gini_anchors() -> Outcome {
    let t = DiversityThresholds::default();
    let heavy: Vec<u64> = (1..=60).map(|r| (1000.0 * (r as f64).powf(-1.5)).floor() as u64).collect();
    let h = classify_url(&table(&heavy), &t);
    check(h.gini >= 0.7 && h.r_squared >= 0.9, || format!("heavy tail gave {h:?}"))?;
    let mut flat = vec![3u64; 40];
    flat.extend([0, 0]);
    let f = classify_url(&table(&flat), &t);
    check(f.gini <= 0.1 && f.r_squared == 0.0, || format!("near-uniform gave {f:?}"))?;
    Ok(format!(
        "heavy gini {:.3} R2 {:.3} ({}), near-uniform gini {:.3} R2 {:.3} ({})",
        h.gini,
        h.r_squared,
        h.label.as_str(),
        f.gini,
        f.r_squared,
        f.label.as_str()
    ))
}

// Graph

fn projection_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut pairs = 0u64;
    for _ in 0..200 {
        let users = rng.random_range(0..=12);
        let days = rng.random_range(1..=8usize);
        let mut incidence: BTreeMap<String, BTreeSet<DayKey>> = BTreeMap::new();
        for u in 0..users {
            let set: BTreeSet<DayKey> = (0..days)
                .filter(|_| rng.random_bool(0.4))
                .map(|d| DayKey { city: City::ALL[d % 3], day: Day(17_000 + d as i32) })
                .collect();
            if !set.is_empty() {
                incidence.insert(format!("u{u}"), set);
            }
        }
        let g = project(&BipartiteGraph::from_incidence(incidence.iter().map(|(u, d)| (u.clone(), d.iter().copied()))));
        let ids: Vec<&String> = incidence.keys().collect();
        let mut edges = 0;
        for (i, a) in ids.iter().enumerate() {
            for b in &ids[i + 1..] {
                let want = incidence[*a].intersection(&incidence[*b]).count() as u32;
                let got = g.multiplicity(a, b);
                check(got == want, || format!("{a}-{b}: {got} vs {want}"))?;
                edges += usize::from(want > 0);
                pairs += 1;
            }
        }
        check(g.edge_count() == edges && g.node_count() == ids.len(), || "edge or node count differs".into())?;
    }
    let took = within(Duration::from_secs(5), started)?;
    Ok(format!("200 graphs, {pairs} pairs in {took:.2?}"))
}

fn graph(n: usize, edges: &[(usize, usize, u32)]) -> CoTweetMultigraph {
    CoTweetMultigraph::from_parts(
        (0..n).map(|i| (format!("n{i}"), 1u64)),
        edges.iter().map(|&(a, b, m)| (format!("n{a}"), format!("n{b}"), m)),
    )
    .unwrap()
}

fn dense_modularity(g: &CoTweetMultigraph, assignment: &[u32]) -> f64 {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for e in g.edges() {
        a[e.a as usize][e.b as usize] = e.multiplicity as f64;
        a[e.b as usize][e.a as usize] = e.multiplicity as f64;
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assignment[i] == assignment[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

fn partitions(n: usize) -> Vec<Vec<u32>> {
    fn grow(p: &mut Vec<u32>, n: usize, max: u32, out: &mut Vec<Vec<u32>>) {
        if p.len() == n {
            out.push(p.clone());
            return;
        }
        for c in 0..=max + 1 {
            p.push(c);
            grow(p, n, max.max(c), out);
            p.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut vec![0], n, 0, &mut out);
    out
}

fn blocks(assignment: &[u32]) -> BTreeSet<BTreeSet<usize>> {
    let mut m: BTreeMap<u32, BTreeSet<usize>> = BTreeMap::new();
    for (i, c) in assignment.iter().enumerate() {
        m.entry(*c).or_default().insert(i);
    }
    m.into_values().collect()
}

/// Louvain result against the unique exhaustive optimum.
fn exhaustive_match(g: &CoTweetMultigraph, expected_partitions: usize) -> Result<(f64, Vec<u32>), String> {
    let all = partitions(g.node_count());
    check(all.len() == expected_partitions, || format!("{} partitions enumerated", all.len()))?;
    let scored: Vec<(f64, &Vec<u32>)> = all.iter().map(|p| (dense_modularity(g, p), p)).collect();
    let best = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let argmax: Vec<&Vec<u32>> = scored.iter().filter(|s| (s.0 - best).abs() <= 1e-12).map(|s| s.1).collect();
    check(argmax.len() == 1, || format!("{} optimal partitions", argmax.len()))?;
    for seed in 0..10 {
        let p = louvain(g, seed, 1.0);
        check(blocks(p.assignment()) == blocks(argmax[0]), || format!("seed {seed}: {:?}", p.assignment()))?;
        check((p.modularity - best).abs() <= 1e-12, || format!("seed {seed}: Q {} vs {best}", p.modularity))?;
    }
    Ok((best, argmax[0].clone()))
}

fn louvain_exactness() -> Outcome {
    let mut edges = Vec::new();
    for base in [0, 4] {
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((base + i, base + j, 1));
            }
        }
    }
    edges.push((3, 4, 1));
    let (q_cliques, best) = exhaustive_match(&graph(8, &edges), 4140)?;
    check(blocks(&best) == blocks(&[0, 0, 0, 0, 1, 1, 1, 1]), || format!("optimum {best:?} is not the clique split"))?;
    let (q_triangle, _) = exhaustive_match(&graph(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]), 5)?;
    Ok(format!("cliques Q = {q_cliques:.6} over 4140 partitions, triangle Q = {q_triangle:.6} over 5"))
}

// End to end through the binary

fn polluter(dir: &Path, args: &[&str]) -> Result<String, String> {
    let o =
        Command::new(env!("CARGO_BIN_EXE_polluter")).current_dir(dir).args(args).output().map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&o.stderr)));
    }
    Ok(String::from_utf8_lossy(&o.stdout).into_owned())
}

/// Second CSV row as a header-keyed map.
type Row = BTreeMap<String, String>;

fn csv_row(path: &Path, want_group: Option<&str>) -> Result<Row, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty file")?.split(',').collect();
    let row = lines
        .find(|l| want_group.is_none_or(|g| l.split(',').next() == Some(g)))
        .ok_or_else(|| format!("no matching row in {}", path.display()))?;
    Ok(header.iter().map(|h| h.to_string()).zip(row.split(',').map(str::to_owned)).collect())
}

fn number(row: &Row, key: &str) -> Result<f64, String> {
    row.get(key).and_then(|v| v.parse().ok()).ok_or_else(|| format!("no numeric `{key}` in {row:?}"))
}

const SYNTH_SEED: &str = "1";

fn planted_run(dir: &Path) -> Result<(Duration, Row), String> {
    let started = Instant::now();
    polluter(dir, &["synth", "--seed", SYNTH_SEED, "--out", "synth"])?;
    polluter(dir, &["detect", "--input", "synth/tweets.jsonl", "--truth", "synth/ground_truth.csv", "--out", "run"])?;
    let took = started.elapsed();
    Ok((took, csv_row(&dir.join("run/truth_comparison.csv"), None)?))
}

fn end_to_end(dir: &Path) -> Outcome {
    let (took, truth) = planted_run(dir)?;
    let (precision, recall) = (number(&truth, "precision")?, number(&truth, "recall")?);
    check(precision >= 0.9 && recall >= 0.9, || format!("precision {precision}, recall {recall}"))?;
    check(took < Duration::from_secs(30), || format!("took {took:.2?}"))?;
    Ok(format!("precision {precision:.3}, recall {recall:.3}, synth + detect in {took:.2?}"))
}

fn flagged_fraction(dir: &Path) -> Outcome {
    let summary = csv_row(&dir.join("run/summary.csv"), None)?;
    let fraction = number(&summary, "flagged_tweet_fraction")?;
    check((fraction - 0.07).abs() <= 0.02, || format!("flagged tweet fraction {fraction}"))?;
    Ok(format!("flagged tweet fraction {fraction:.4}"))
}

fn determinism(dir: &Path) -> Outcome {
    polluter(dir, &["synth", "--seed", SYNTH_SEED, "--out", "synth2"])?;
    polluter(dir, &["detect", "--input", "synth/tweets.jsonl", "--truth", "synth/ground_truth.csv", "--out", "run2"])?;
    let mut compared = 0;
    for name in ["tweets.jsonl", "ground_truth.csv", "calendar.csv"] {
        let same = fs::read(dir.join("synth").join(name)).ok() == fs::read(dir.join("synth2").join(name)).ok();
        check(same, || format!("synth/{name} differs"))?;
        compared += 1;
    }
    for entry in fs::read_dir(dir.join("run")).map_err(|e| e.to_string())? {
        let name = entry.map_err(|e| e.to_string())?.file_name();
        if name == "effective_config.txt" {
            continue;
        }
        let same = fs::read(dir.join("run").join(&name)).ok() == fs::read(dir.join("run2").join(&name)).ok();
        check(same, || format!("{name:?} differs between runs"))?;
        compared += 1;
    }
    Ok(format!("{compared} files byte-identical"))
}

// Statistics

fn exact_tail(successes: u64, trials: u64, p: &BigRational) -> BigRational {
    let one = BigRational::from_integer(1.into());
    let q = &one - p;
    let choose = |k: u64| (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(trials - i) / BigInt::from(i + 1));
    let pow = |b: &BigRational, e: u64| (0..e).fold(one.clone(), |acc, _| acc * b);
    (successes..=trials)
        .map(|i| BigRational::from_integer(choose(i)) * pow(p, i) * pow(&q, trials - i))
        .fold(BigRational::from_integer(0.into()), |acc, t| acc + t)
}

fn statistics() -> Outcome {
    let tolerance = BigRational::new(1.into(), BigInt::from(10).pow(12));
    let mut worst = 0.0f64;
    let mut cases = 0;
    for trials in 0..=20u64 {
        for successes in 0..=trials {
            for p in [0.05, 0.1, 0.25, 0.3, 0.5, 0.7, 0.9, 0.95] {
                let got = binomial_significance(successes, trials, p).map_err(|e| e.to_string())?;
                let diff = BigRational::from_float(got).unwrap()
                    - exact_tail(successes, trials, &BigRational::from_float(p).unwrap());
                let diff = if diff < BigRational::from_integer(0.into()) { -diff } else { diff };
                check(diff < tolerance, || format!("tail({successes}, {trials}, {p}) off by more than 1e-12"))?;
                worst = worst.max(approx_f64(&diff));
                cases += 1;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draw = |mean: f64, rng: &mut ChaCha8Rng| -> Vec<f64> {
        let d = Normal::new(mean, 1.0).unwrap();
        (0..500).map(|_| d.sample(rng)).collect()
    };
    let bots = draw(2.9, &mut rng);
    let legit = draw(4.2, &mut rng);
    let t = welch_t_test(&bots, &legit).map_err(|e| e.to_string())?;
    check(t.p_value < 0.01 && t.t < 0.0, || format!("planted ages gave {t:?}"))?;
    Ok(format!("{cases} binomial tails, max error {worst:.1e}; planted ages t = {:.2}, p = {:.1e}", t.t, t.p_value))
}

fn approx_f64(r: &BigRational) -> f64 {
    let scale = BigInt::from(10).pow(18);
    let scaled = (r * BigRational::from_integer(scale)).to_integer();
    scaled.to_string().parse::<f64>().unwrap_or(f64::INFINITY) / 1e18
}

// Fixtures

fn fixture_splits(dir: &Path) -> Outcome {
    let flagged: Vec<String> = (0..849).map(|i| format!("{}", 7_000_000 + i)).collect();
    let set: BTreeSet<&str> = flagged.iter().map(String::as_str).collect();
    let statuses: Vec<(String, AccountStatus)> = flagged
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), AccountStatus::from_code(if i < 153 { Some(63) } else { None }).unwrap()))
        .collect();
    let summary = account_status_report(&statuses, &set);
    check(summary.suspended_count == 153, || format!("suspended_count {}", summary.suspended_count))?;

    // external scores through the eval command
    let mut flagged_csv = String::from("user_id\n");
    let mut labelled = String::from("user_id,label_1,label_2,label_3,predicted\n");
    let mut scores = String::from("user_id,score\n");
    for i in 0..100 {
        let tp = format!("tp{i}");
        let fp = format!("fp{i}");
        flagged_csv += &format!("{tp}\n{fp}\n");
        labelled += &format!("{tp},bot,bot,legitimate,bot\n{fp},legitimate,,legitimate,bot\n");
        scores += &format!("{tp},{}\n{fp},{}\n", if i < 65 { 0.74 } else { 0.12 }, if i < 21 { 0.51 } else { 0.49 });
    }
    fs::write(dir.join("flagged.csv"), flagged_csv).map_err(|e| e.to_string())?;
    fs::write(dir.join("labelled.csv"), labelled).map_err(|e| e.to_string())?;
    fs::write(dir.join("scores.csv"), scores).map_err(|e| e.to_string())?;
    polluter(
        dir,
        &["eval", "--flagged", "flagged.csv", "--labelled", "labelled.csv", "--scores", "scores.csv", "--out", "eval"],
    )?;
    let tp = number(&csv_row(&dir.join("eval/score_summary.csv"), Some("true_positive"))?, "above_half_fraction")?;
    let fp = number(&csv_row(&dir.join("eval/score_summary.csv"), Some("false_positive"))?, "above_half_fraction")?;
    check(tp == 0.65 && fp == 0.21, || format!("fractions {tp} / {fp}"))?;
    Ok(format!("suspended 153 of 849; external scores above 0.5: {tp} / {fp}"))
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let criteria: Vec<Criterion> = vec![
        ("gini oracle equivalence", Box::new(gini_oracle)),
        ("gini shape anchors", Box::new(gini_anchors)),
        ("projection oracle", Box::new(projection_oracle)),
        ("louvain exactness", Box::new(louvain_exactness)),
        ("end-to-end planted detection", Box::new(|| end_to_end(d))),
        ("bot tweet fraction", Box::new(|| flagged_fraction(d))),
        ("statistics correctness", Box::new(statistics)),
        ("fixture splits", Box::new(|| fixture_splits(d))),
        ("determinism", Box::new(|| determinism(d))),
    ];
    let mut failed = Vec::new();
    for (name, run) in &criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(reason) => {
                println!("FAIL {name}: {reason}");
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
