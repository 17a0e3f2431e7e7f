use std::time::Instant;

use ogc_core::complex::{differential_matrix, enumerate_basis, BasisSlice, Constraints, SliceParams};
use ogc_core::hmap::{check_h_invariants, quasi_iso_check, verify_chain_map};
use ogc_core::homology::{graph_homology, slice_chain, ChainComplex};
use ogc_core::special::{SpecialComplex, SpecialFamily};
use ogc_core::{ColoredGraph, Parity};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cache::{self, Cache};
use crate::config::{Command, JobConfig};
use crate::error::CliError;
use crate::record::{ResultRecord, Row};

type Rows = Result<Vec<Row>, CliError>;

/// One-line form of the graph text format.
fn one_line(g: &ColoredGraph) -> String {
    g.to_string().trim_end().replace('\n', "; ")
}

fn slice_row(p: &SliceParams, value: Value) -> Row {
    Row { v: p.v, e: p.e, b: p.loop_number(), degree: p.degree(), value }
}

/// Runs the job, or returns the cached record for its key. The flag tells
/// whether the cache was hit.
pub fn run(cfg: &JobConfig) -> Result<(ResultRecord, bool), CliError> {
    let cache = cfg.cache_dir.as_deref().map(Cache::new);
    let key = cache::key(cfg.command, &cfg.params);
    if let Some(record) = cache.as_ref().map(|c| c.load(&key)).transpose()?.flatten() {
        return Ok((record, true));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    let start = Instant::now();
    let mut rows = pool.install(|| compute(cfg))?;
    // stable: rows sharing a slice key keep their generation order
    rows.sort_by_key(|r| (r.b, r.v, r.e));
    let record = ResultRecord { command: cfg.command, params: cfg.params.clone(), rows, timing: start.elapsed().as_secs_f64() };
    if let Some(c) = &cache {
        c.store(&key, &record)?;
    }
    Ok((record, false))
}

pub fn compute(cfg: &JobConfig) -> Rows {
    if cfg.params.window.is_empty() {
        return Ok(Vec::new());
    }
    match cfg.command {
        Command::Enumerate => enumerate(cfg),
        Command::Homology => homology(cfg),
        Command::VerifyDsq => verify_dsq(cfg),
        Command::VerifyChain => verify_chain(cfg),
        Command::VerifyThm1 => verify_thm1(cfg),
        Command::VerifyProps => verify_props(cfg),
    }
}

fn window_slices(cfg: &JobConfig, constraints: Constraints) -> Vec<SliceParams> {
    cfg.params
        .window
        .vertices()
        .flat_map(|v| cfg.edge_counts(v).into_iter().map(move |e| SliceParams { constraints, ..cfg.slice(v, e) }))
        .collect()
}

fn enumerate(cfg: &JobConfig) -> Rows {
    window_slices(cfg, cfg.constraints)
        .par_iter()
        .map(|p| {
            let slice = enumerate_basis(p)?;
            let value = if cfg.params.graphs {
                json!({ "size": slice.len(), "graphs": slice.basis.iter().map(one_line).collect::<Vec<_>>() })
            } else {
                json!(slice.len())
            };
            Ok(slice_row(p, value))
        })
        .collect()
}

fn homology(cfg: &JobConfig) -> Rows {
    let w = cfg.params.window;
    let per_b = cfg
        .loop_orders()
        .par_iter()
        .map(|&b| {
            let rows = graph_homology(b, cfg.params.colors, cfg.params.n, cfg.constraints, w.lo, w.hi)?;
            Ok(rows
                .into_iter()
                .filter(|r| r.e <= cfg.params.edges_max)
                .map(|r| Row { v: r.v, e: r.e, b: r.b, degree: r.degree, value: json!(r.dim) })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(per_b.into_iter().flatten().collect())
}

fn verify_dsq(cfg: &JobConfig) -> Rows {
    let w = cfg.params.window;
    let per_b = cfg
        .loop_orders()
        .par_iter()
        .map(|&b| {
            // two slices below the window serve as targets
            let chain: Vec<BasisSlice> =
                slice_chain(b, cfg.params.colors, cfg.params.n, cfg.constraints, w.lo.saturating_sub(2), w.hi)?
                    .into_iter()
                    .filter(|s| s.params.e <= cfg.params.edges_max)
                    .collect();
            let maps = chain.windows(2).map(|x| differential_matrix(&x[0], &x[1])).collect::<Result<Vec<_>, _>>()?;
            let cx = ChainComplex::new(chain.iter().map(BasisSlice::len).collect(), maps)?;
            let mut rows = Vec::new();
            for (i, src) in chain.iter().enumerate().take(cx.maps.len().saturating_sub(1)) {
                if src.params.v < w.lo {
                    continue;
                }
                let product = cx.maps[i + 1].mul(&cx.maps[i])?;
                let bad = product.entries().iter().map(|&(_, c, _)| c).min();
                let detail = match bad {
                    None => format!("({} graphs)", src.len()),
                    Some(c) => format!("(d^2 nonzero on {})", one_line(&src.basis[c])),
                };
                rows.push(Row::check(src.params.v, src.params.e, b, src.degree, bad.is_none(), detail));
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(per_b.into_iter().flatten().collect())
}

fn verify_chain(cfg: &JobConfig) -> Rows {
    let n = cfg.params.n;
    let p = Parity::of(n);
    window_slices(cfg, Constraints::gc())
        .par_iter()
        .map(|params| {
            let slice = enumerate_basis(params)?;
            let mut failure = None;
            for g in &slice.basis {
                let report = verify_chain_map(g, p)?;
                let problem = if !report.native_ok() {
                    Some("dh != hd".to_string())
                } else if !report.expanded_ok() {
                    Some("dh != hd after expansion".to_string())
                } else {
                    check_h_invariants(g, n).err()
                };
                if let Some(what) = problem {
                    failure = Some(format!("({what} on {})", one_line(g)));
                    break;
                }
            }
            let ok = failure.is_none();
            let detail = failure.unwrap_or_else(|| format!("({} graphs)", slice.len()));
            Ok(Row::check(params.v, params.e, params.loop_number(), params.degree(), ok, detail))
        })
        .collect()
}

fn verify_thm1(cfg: &JobConfig) -> Rows {
    let w = cfg.params.window;
    let n = cfg.params.n;
    let bs = match cfg.params.loop_order {
        Some(b) => vec![b],
        None => (1..=(w.hi / 2) as i64).collect(),
    };
    let per_b = bs
        .par_iter()
        .map(|&b| {
            let report = quasi_iso_check(b, cfg.params.colors, n, w.hi)?;
            Ok(report
                .rows
                .iter()
                .filter_map(|r| {
                    // degree = v - n + b(1 - n)
                    let v = r.v.map_or(r.degree + n + b * (n - 1), |v| v as i64);
                    let detail = format!("(H={}, H'={}, rank {})", r.source_dim, r.target_dim, r.induced_rank);
                    (v >= w.lo as i64).then(|| Row::check(v as usize, (v + b) as usize, b, r.degree, r.ok(), detail))
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(per_b.into_iter().flatten().collect())
}

fn verify_props(cfg: &JobConfig) -> Rows {
    let w = cfg.params.window;
    let (k, n) = (cfg.params.colors, cfg.params.n);
    let bs = match cfg.params.loop_order {
        Some(b) => vec![b],
        None => (-1..=1).collect(),
    };
    let per_b = bs
        .par_iter()
        .map(|&b| {
            let full = graph_homology(b, k, n, Constraints::full(), w.lo, w.hi)?;
            let min2 = graph_homology(b, k, n, Constraints::min2(), w.lo, w.hi)?;
            Ok(full
                .iter()
                .zip(&min2)
                .filter(|(f, _)| f.e <= cfg.params.edges_max)
                .map(|(f, m)| {
                    Row::check(f.v, f.e, f.b, f.degree, f.dim == m.dim, format!("min-valence-2 (H={}, H>=2={})", f.dim, m.dim))
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut rows: Vec<Row> = per_b.into_iter().flatten().collect();
    if k == 0 {
        rows.extend(quotient_rows(cfg)?);
    }
    Ok(rows)
}

/// Acyclicity of the tadpole and multi-edge subcomplexes of the special
/// complex with odd N. Only loop orders whose skeletons all fit in the
/// window (v <= 2b) are checked, so the complexes are complete.
fn quotient_rows(cfg: &JobConfig) -> Rows {
    let w = cfg.params.window;
    let big_n = if cfg.params.n % 2 == 0 { cfg.params.n + 1 } else { cfg.params.n };
    let bs: Vec<i64> = match cfg.params.loop_order {
        Some(b) if b >= 1 && 2 * b as usize <= w.hi => vec![b],
        Some(_) => Vec::new(),
        None => (1..=(w.hi / 2) as i64).collect(),
    };
    let jobs: Vec<(i64, SpecialFamily)> =
        bs.iter().flat_map(|&b| [SpecialFamily::Tadpole, SpecialFamily::MultiEdge].map(|f| (b, f))).collect();
    let per_job = jobs
        .par_iter()
        .map(|&(b, family)| {
            let cx = SpecialComplex::build(b, 0, big_n, family, 2 * b as usize)?;
            let h = cx.complex.homology();
            Ok(cx
                .pieces
                .iter()
                .zip(h)
                .map(|(piece, dim)| {
                    let vv = piece.expanded_vertices;
                    let detail = format!("{family} N={big_n} (H={dim} on {} graphs)", piece.basis.len());
                    Row::check(vv, (vv as i64 + b) as usize, b, piece.degree, dim == 0, detail)
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(per_job.into_iter().flatten().collect())
}
