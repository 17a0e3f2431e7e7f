use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ogc(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ogc"));
    cmd.args(args).env_remove("OGC_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("OGC_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn rows(out: &Output) -> Vec<Value> {
    json(out)["rows"].as_array().unwrap().clone()
}

fn value_at(rows: &[Value], v: u64, e: u64) -> Value {
    rows.iter().find(|r| r["v"] == v && r["e"] == e).map(|r| r["value"].clone()).unwrap_or(Value::Null)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn perm_sign(p: &[usize]) -> i32 {
    let inversions = (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Brute-force count of uncolored graph classes on `v` vertices and `e`
/// edges that are connected, at least 3-valent, and have no automorphism
/// acting by -1.
fn oracle_count(v: usize, e: usize, n_even: bool) -> usize {
    let pairs: Vec<(usize, usize)> = (0..v).flat_map(|i| (i + 1..v).map(move |j| (i, j))).collect();
    let perms = permutations(v);
    let mut seen = std::collections::BTreeSet::new();
    let mut count = 0;
    // multisets of e pairs
    let mut stack = vec![(0usize, Vec::<usize>::new())];
    while let Some((start, chosen)) = stack.pop() {
        if chosen.len() < e {
            for i in start..pairs.len() {
                let mut c = chosen.clone();
                c.push(i);
                stack.push((i, c));
            }
            continue;
        }
        let edges: Vec<(usize, usize)> = chosen.iter().map(|&i| pairs[i]).collect();
        let mut valence = vec![0; v];
        for &(a, b) in &edges {
            valence[a] += 1;
            valence[b] += 1;
        }
        if valence.iter().any(|&d| d < 3) {
            continue;
        }
        let mut comp: Vec<usize> = (0..v).collect();
        for _ in 0..v {
            for &(a, b) in &edges {
                let m = comp[a].min(comp[b]);
                comp[a] = m;
                comp[b] = m;
            }
        }
        if comp.iter().any(|&c| c != 0) {
            continue;
        }
        let relabel = |p: &[usize]| {
            let mut es: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
            es.sort();
            es
        };
        let canon = perms.iter().map(|p| relabel(p)).min().unwrap();
        if !seen.insert(canon) {
            continue;
        }
        let mut sorted = edges.clone();
        sorted.sort();
        let has_parallel = sorted.windows(2).any(|w| w[0] == w[1]);
        let odd = perms.iter().filter(|p| relabel(p) == sorted).any(|p| {
            if n_even {
                // swapping two parallel edges is an odd edge permutation
                if has_parallel {
                    return true;
                }
                let image: Vec<usize> = sorted
                    .iter()
                    .map(|&(a, b)| sorted.iter().position(|&x| x == (p[a].min(p[b]), p[a].max(p[b]))).unwrap())
                    .collect();
                perm_sign(&image) == -1
            } else {
                let flips = sorted.iter().filter(|&&(a, b)| p[a] > p[b]).count() as i32;
                perm_sign(p) * (-1i32).pow(flips as u32) == -1
            }
        });
        if !odd {
            count += 1;
        }
    }
    count
}

#[test]
fn enumerate_trivial_slices() {
    let out = ogc(&["--command", "enumerate", "--vertices-max", "2", "--edges-max", "2"], None);
    let r = rows(&out);
    assert_eq!(value_at(&r, 1, 0), Value::from(1));
    assert_eq!(value_at(&r, 2, 2), Value::from(0));
}

#[test]
fn enumerate_matches_brute_force() {
    for n in ["2", "3"] {
        let out = ogc(&["--command", "enumerate", "--n", n, "--constraints", "gc", "--window", "4:4", "--loop-order", "2"], None);
        let want = oracle_count(4, 6, n == "2");
        assert_eq!(value_at(&rows(&out), 4, 6), Value::from(want), "n={n}");
    }
    // multi-edges survive for odd n
    let out = ogc(&["--command", "enumerate", "--n", "3", "--constraints", "gc", "--window", "4:4", "--loop-order", "4", "--edges-max", "8"], None);
    let want = oracle_count(4, 8, false);
    assert!(want > 0);
    assert_eq!(value_at(&rows(&out), 4, 8), Value::from(want));
}

#[test]
fn enumerate_lists_graphs() {
    let out = ogc(&["--command", "enumerate", "--constraints", "gc", "--window", "4:4", "--loop-order", "2", "--graphs"], None);
    let value = value_at(&rows(&out), 4, 6);
    assert_eq!(value["size"], 1);
    assert_eq!(value["graphs"].as_array().unwrap().len(), 1);
}

#[test]
fn homology_has_the_k4_class() {
    let out = ogc(&["--command", "homology", "--constraints", "gc", "--loop-order", "2"], None);
    assert!(value_at(&rows(&out), 4, 6).as_u64().unwrap() >= 1);
}

#[test]
fn empty_window_gives_empty_table() {
    let out = ogc(&["--command", "homology", "--window", "3:2"], None);
    assert!(rows(&out).is_empty());
}

#[test]
fn csv_mirrors_rows() {
    let out = ogc(&["--command", "enumerate", "--vertices-max", "2", "--edges-max", "1", "--output", "csv"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "v,e,b,degree,value");
    assert!(lines.contains(&"1,0,-1,0,1"));
    assert_eq!(lines.len(), 5);
}

#[test]
fn verification_suites_pass() {
    for command in ["verify-dsq", "verify-chain", "verify-thm1", "verify-props"] {
        for n in ["2", "3"] {
            let out = ogc(&["--command", command, "--n", n], None);
            let r = rows(&out);
            assert!(!r.is_empty(), "{command}");
            assert!(r.iter().all(|row| row["value"].as_str().unwrap().starts_with("pass")), "{command} n={n}");
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ogc(&["--command", "enumerate", "--vertices-max", "9"], None).status.code(), Some(2));
    assert_eq!(ogc(&["--command", "nonsense"], None).status.code(), Some(2));
    assert_eq!(ogc(&["--command", "enumerate", "--constraints", "bogus"], None).status.code(), Some(2));
    assert_eq!(ogc(&["--command", "enumerate", "--workers", "0"], None).status.code(), Some(2));
    let forced = ogc(&["--command", "enumerate", "--vertices-max", "9", "--window", "9:9", "--edges-max", "0", "--force"], None);
    assert!(forced.status.success());
}

#[test]
fn cache_hit_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--command", "homology", "--constraints", "gc", "--loop-order", "2"];
    let first = ogc(&args, Some(dir.path()));
    assert!(first.status.success());
    assert!(String::from_utf8_lossy(&first.stderr).is_empty());
    let second = ogc(&args, Some(dir.path()));
    assert_eq!(first.stdout, second.stdout);
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit"));
    // the flag overrides the environment
    let other = tempfile::tempdir().unwrap();
    let mut flagged = args.to_vec();
    let path = other.path().to_str().unwrap();
    flagged.extend(["--cache-dir", path]);
    let third = ogc(&flagged, Some(dir.path()));
    assert!(!String::from_utf8_lossy(&third.stderr).contains("cache hit"));
    assert_eq!(std::fs::read_dir(other.path()).unwrap().count(), 1);
}

#[test]
fn corrupt_cache_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--command", "enumerate", "--vertices-max", "2", "--edges-max", "1"];
    assert!(ogc(&args, Some(dir.path())).status.success());
    let entry = std::fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    std::fs::write(&entry, "garbage").unwrap();
    let out = ogc(&args, Some(dir.path()));
    assert_eq!(out.status.code(), Some(1));
    let key = entry.file_stem().unwrap().to_str().unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains(key));
}

#[test]
fn rows_do_not_depend_on_worker_count() {
    let base = ["--command", "homology", "--constraints", "full", "--vertices-max", "4", "--edges-max", "5"];
    let mut one = json(&ogc(&[&base[..], &["--workers", "1"]].concat(), None));
    let mut four = json(&ogc(&[&base[..], &["--workers", "4"]].concat(), None));
    one["timing"] = Value::Null;
    four["timing"] = Value::Null;
    assert_eq!(one, four);
}
