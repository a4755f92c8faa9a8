//! Acceptance criteria, driven through the `shrinker` binary.
//!
//! Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn shrinker(dir: &Path, args: &[&str]) -> Result<Duration, String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_shrinker"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| format!("spawn failed: {e}"))?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!(
            "`shrinker {}` exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(elapsed)
}

fn report(dir: &Path, out: &str, file: &str) -> Result<Value, String> {
    let path = dir.join(out).join(file);
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(doc["report"].clone())
}

fn f(v: &Value) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("expected a number, got {v}"))
}

/// Data rows of a CSV artifact, keyed by header name.
fn csv_rows(path: &Path) -> Result<Vec<BTreeMap<String, String>>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().ok_or("empty csv")?.split(',').collect();
    Ok(lines
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(String::from)).collect())
        .collect())
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn criterion_1(dir: &Path) -> Outcome {
    let t = shrinker(dir, &["canonical", "--p", "0,1,2", "--n", "2", "--grid", "101x101", "--out", "c1"])?;
    let rep = report(dir, "c1", "canonical.json")?;
    let rows = rep["shrinkers"].as_array().ok_or("no shrinkers")?;
    ensure!(rows.len() == 3, "expected 3 shrinkers");
    let mut worst = (0.0f64, 0.0f64);
    for row in rows {
        let p = row["p"].as_u64().unwrap_or(99);
        ensure!(row["samples"].as_u64().unwrap_or(0) >= 10_000, "p = {p}: too few samples");
        let r = f(&row["max_abs_soliton_residual"])?;
        ensure!(r < 1e-12, "p = {p}: max |shrinker_residual| = {r:e}");
        worst.0 = worst.0.max(r);
        if p >= 1 {
            let a = f(&row["max_abs_norm_a_sq_dev"])?;
            ensure!(a < 1e-12, "p = {p}: max ||A|^2 - 1/2| = {a:e}");
            worst.1 = worst.1.max(a);
        }
    }
    ensure!(t < Duration::from_secs(5), "runtime {}", secs(t));
    Ok(format!("max |H + f/2| = {:e}, max ||A|^2 - 1/2| = {:e}, {}", worst.0, worst.1, secs(t)))
}

fn convergence(dir: &Path, check: &str, out_prefix: &str) -> Outcome {
    let mut details = Vec::new();
    for (name, surface) in [("ellipsoid", "ellipsoid:a=1,b=1.5,c=2"), ("torus", "torus:R=2,r=0.5")] {
        let out = format!("{out_prefix}_{name}");
        let t = shrinker(
            dir,
            &["identities", "--surface", surface, "--grid", "161x161", "--refine", "--checks", check, "--out", &out],
        )?;
        let rep = report(dir, &out, "identities.json")?;
        let levels = rep["reports"][0]["levels"].as_array().ok_or("no levels")?;
        ensure!(levels.len() == 2, "expected two levels");
        let coarse = &levels[0]["report"];
        let fine = &levels[1]["report"];
        let factor = f(&coarse["residual_inf"])? / f(&fine["residual_inf"])?;
        let order = f(&fine["order_estimate"])?;
        let finest = f(&fine["residual_inf"])?;
        let interior = fine["interior_nodes"].as_u64().unwrap_or(0);
        ensure!((3.0..=5.0).contains(&factor), "{name}: reduction factor {factor}");
        ensure!((order - 2.0).abs() <= 0.3, "{name}: order {order}");
        ensure!(finest < 1e-3, "{name}: finest residual_inf {finest:e}");
        ensure!(interior >= 161 * 161, "{name}: {interior} interior nodes");
        ensure!(t < Duration::from_secs(30), "{name}: runtime {}", secs(t));
        details.push(format!("{name} order {order:.3}, finest {finest:.2e} on {interior} nodes, {}", secs(t)));
    }
    Ok(details.join("; "))
}

fn criterion_2(dir: &Path) -> Outcome {
    convergence(dir, "master", "c2")
}

fn criterion_3(dir: &Path) -> Outcome {
    convergence(dir, "grad", "c3")
}

fn criterion_4(dir: &Path) -> Outcome {
    let mut worst = 0.0f64;
    for (name, surface) in [("sphere", "sphere:r=2"), ("cylinder", "cylinder:r=1.4142135623730951")] {
        let out = format!("c4_{name}");
        shrinker(dir, &["identities", "--surface", surface, "--grid", "11x11", "--refine", "3", "--checks", "pde", "--out", &out])?;
        let rep = report(dir, &out, "identities.json")?;
        for level in rep["reports"][0]["levels"].as_array().ok_or("no levels")? {
            let r = f(&level["report"]["residual_inf"])?;
            ensure!(r < 1e-8, "{name} on {}: residual {r:e}", level["grid"]);
            worst = worst.max(r);
        }
    }
    Ok(format!("max PDE residual {worst:e} over grids 11..81 on both surfaces"))
}

fn criterion_5(dir: &Path) -> Outcome {
    shrinker(dir, &["spiral", "--profile", "arctan:m=1,a=1", "--checks", "curvature", "--t", "-50:50:2001", "--out", "c5a"])?;
    let rep = report(dir, "c5a", "spiral.json")?;
    let k_plus = f(&rep["curvature"]["at_t_max"])?;
    let k_minus = f(&rep["curvature"]["at_t_min"])?;
    ensure!((k_plus - 1.0).abs() < 0.02, "k(50) = {k_plus}");
    ensure!((k_minus - 0.5).abs() < 0.02, "k(-50) = {k_minus}");
    shrinker(
        dir,
        &["spiral", "--profile", "arctan:m=1,a=1", "--d", "2", "--checks", "curvature", "--t", "-100:100:10000", "--out", "c5b"],
    )?;
    let rep = report(dir, "c5b", "spiral.json")?;
    let (lo, hi) = (f(&rep["curvature"]["min"])?, f(&rep["curvature"]["max"])?);
    ensure!(lo > 1.0 / 3.0 && hi < 0.5, "d = 2: k in [{lo}, {hi}]");
    Ok(format!("k(50) = {k_plus:.4}, k(-50) = {k_minus:.4}; d = 2: k in [{lo:.4}, {hi:.4}] on 10000 nodes"))
}

fn criterion_6(dir: &Path) -> Outcome {
    let t = shrinker(
        dir,
        &["spiral", "--profile", "arctan:m=1,a=1", "--checks", "chain", "--t", "-50:50:2001", "--s", "-100:100:2001", "--out", "c6"],
    )?;
    let chain = report(dir, "c6", "spiral.json")?["chain"].clone();
    let links = chain["links"].as_array().ok_or("no links")?;
    ensure!(links.len() == 3, "expected 3 links");
    for l in links {
        ensure!(l["holds"] == Value::Bool(true), "link {} fails, margin {}", l["name"], l["worst_margin"]);
    }
    let nodes = chain["nodes"].as_u64().unwrap_or(0);
    let min = f(&chain["min_norm_sq"])?;
    let gap = f(&chain["max_form_disagreement"])?;
    ensure!(nodes == 2001 * 2001, "{nodes} nodes");
    ensure!(min > 1.0, "min |R|^2 = {min}");
    ensure!(gap <= 1e-12, "form disagreement {gap:e}");
    ensure!(t < Duration::from_secs(60), "runtime {}", secs(t));
    Ok(format!("{nodes} nodes, min |R|^2 = {min:.6}, form gap {gap:.1e}, {}", secs(t)))
}

fn criterion_7(dir: &Path) -> Outcome {
    shrinker(dir, &["spiral", "--profile", "exp", "--checks", "curvature", "--t", "0:1:11", "--out", "c7"])?;
    let v = f(&report(dir, "c7", "spiral.json")?["norm_sq_t0_s0"])?;
    ensure!(v == 4.0, "|R_0(0)|^2 = {v}");
    Ok("|R_0(0)|^2 = 4".into())
}

fn radius(row: &BTreeMap<String, String>) -> f64 {
    let c0: f64 = row["c0"].parse().unwrap_or(f64::NAN);
    let c1: f64 = row["c1"].parse().unwrap_or(f64::NAN);
    c0.hypot(c1)
}

fn criterion_8(dir: &Path) -> Outcome {
    let start = Instant::now();
    let diag = 0.01 * 2f64.sqrt();
    let tol = format!("{diag}");
    shrinker(
        dir,
        &[
            "omission", "--surface", "circle:r=1", "--box", "-2:2,-2:2", "--cells", "400", "--t",
            "-3.141592653589793:3.141592653589793:6284", "--cover-tol", &tol, "--out", "c8_circle",
        ],
    )?;
    let rows = csv_rows(&dir.join("c8_circle/raster.csv"))?;
    ensure!(rows.len() == 160_000, "{} cells", rows.len());
    for row in &rows {
        let (r, covered) = (radius(row), row["covered"] == "1");
        ensure!(covered || r < 1.0, "uncovered cell outside the disk at |c| = {r}");
        ensure!(!covered || r >= 1.0 - diag, "covered cell deep inside the disk at |c| = {r}");
    }
    shrinker(
        dir,
        &[
            "omission", "--surface", "spiral-cylinder:arctan,m=1,a=1", "--box", "-2:2,-2:2", "--cells", "400", "--t",
            "-50:50:2001", "--out", "c8_spiral",
        ],
    )?;
    let summary = report(dir, "c8_spiral", "omission.json")?;
    let cover_tol = f(&summary["cover_tol"])?;
    let rows = csv_rows(&dir.join("c8_spiral/raster.csv"))?;
    let inner = rows.iter().filter(|r| radius(r) <= 1.0 - cover_tol && r["covered"] == "1").count();
    let shell: Vec<_> = rows.iter().filter(|r| (1.05..=1.8).contains(&radius(r))).collect();
    let frac = shell.iter().filter(|r| r["covered"] == "1").count() as f64 / shell.len() as f64;
    ensure!(inner == 0, "{inner} covered cells with |c| <= 1 - cover_tol");
    ensure!(frac > 0.99, "annulus coverage {frac}");
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(300), "runtime {}", secs(t));
    Ok(format!(
        "circle control exact to one cell diagonal; spiral: 0 covered cells inside, annulus coverage {frac:.4}, {}",
        secs(t)
    ))
}

fn criterion_9(dir: &Path) -> Outcome {
    let args = |profile: &'static str, out: &'static str| {
        ["spiral", "--profile", profile, "--checks", "trap", "--trap", "1.2", "--trap-t", "50,100,200,400", "--out", out]
    };
    shrinker(dir, &args("arctan:m=1,a=1", "c9_arctan"))?;
    let trap = report(dir, "c9_arctan", "spiral.json")?["trap"].clone();
    let rows = trap["rows"].as_array().ok_or("no rows")?;
    let lengths: Vec<f64> = rows.iter().map(|r| f(&r["arc_length_inside"])).collect::<Result<_, _>>()?;
    ensure!(lengths.windows(2).all(|w| w[1] > w[0]), "lengths not increasing: {lengths:?}");
    let slope = f(&rows[3]["slope"])?;
    ensure!((slope - 1.0).abs() < 0.1, "slope at T = 400: {slope}");
    shrinker(dir, &args("poly:c2=1", "c9_proper"))?;
    let proper = report(dir, "c9_proper", "spiral.json")?["trap"].clone();
    ensure!(proper["verdict"] == "Saturated", "comparison verdict {}", proper["verdict"]);
    Ok(format!("lengths {lengths:.3?}, slope {slope:.4}; comparison curve saturates"))
}

const CRITERIA: [(&str, fn(&Path) -> Outcome); 9] = [
    ("canonical shrinker suite", criterion_1),
    ("master identity convergence", criterion_2),
    ("gradient identity convergence", criterion_3),
    ("shrinker PDE on round shrinkers", criterion_4),
    ("spiral curvature limits", criterion_5),
    ("tangent-line inequality chain", criterion_6),
    ("exp profile spot value", criterion_7),
    ("omission raster", criterion_8),
    ("trapped arc length", criterion_9),
];

fn artifacts(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if matches!(path.extension().and_then(|e| e.to_str()), Some("csv" | "json")) {
                out.push(path.strip_prefix(root).expect("under root").to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn criterion_10(first: &Path, second: &Path) -> Outcome {
    for (_, run) in CRITERIA {
        run(second).map_err(|e| format!("second run failed: {e}"))?;
    }
    let a = artifacts(first);
    let b = artifacts(second);
    ensure!(a == b, "different artifact sets");
    for rel in &a {
        let same = std::fs::read(first.join(rel)).ok() == std::fs::read(second.join(rel)).ok();
        ensure!(same, "{} differs between runs", rel.display());
    }
    Ok(format!("{} CSV/JSON files byte-identical across two runs", a.len()))
}

fn main() -> ExitCode {
    let first = tempfile::tempdir().expect("tempdir");
    let second = tempfile::tempdir().expect("tempdir");
    let mut failed = 0;
    let mut line = |n: usize, name: &str, outcome: Outcome| {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n:>2} [{tag}] {name}: {detail}");
    };
    for (i, (name, run)) in CRITERIA.iter().enumerate() {
        line(i + 1, name, run(first.path()));
    }
    line(10, "determinism", criterion_10(first.path(), second.path()));
    if failed == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria fail");
        ExitCode::FAILURE
    }
}
