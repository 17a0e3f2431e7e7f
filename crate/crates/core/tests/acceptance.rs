//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use ogc_core::complex::{differential_matrix, enumerate_basis, BasisSlice, Constraints, SliceParams};
use ogc_core::hmap::{check_h_invariants, quasi_iso_check, verify_chain_map};
use ogc_core::homology::{graph_homology, slice_chain, ChainComplex};
use ogc_core::special::{SpecialComplex, SpecialFamily};
use ogc_core::{ColoredGraph, Edge, GroupElement, Parity};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const PARITIES: [i64; 2] = [2, 3];

fn square_zero() -> Outcome {
    let (mut chains, mut products) = (0, 0);
    for k in 0..=1 {
        for n in PARITIES {
            for (name, c) in [("connected", Constraints::full()), ("gc", Constraints::gc())] {
                for b in -1..=7i64 {
                    let chain: Vec<BasisSlice> = slice_chain(b, k, n, c, 1, 5)
                        .map_err(|e| e.to_string())?
                        .into_iter()
                        .filter(|s| s.params.e <= 8)
                        .collect();
                    if chain.is_empty() {
                        continue;
                    }
                    let maps = chain
                        .windows(2)
                        .map(|w| differential_matrix(&w[0], &w[1]))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| e.to_string())?;
                    let cx = ChainComplex::new(chain.iter().map(BasisSlice::len).collect(), maps).map_err(|e| e.to_string())?;
                    let bad = cx.square_zero_failures();
                    if !bad.is_empty() {
                        return Err(format!("k={k} n={n} {name} b={b}: nonzero product after slice {}", chain[bad[0]].params));
                    }
                    chains += 1;
                    products += cx.maps.len().saturating_sub(1);
                }
            }
        }
    }
    Ok(format!("{chains} chains, {products} products exactly zero"))
}

/// Basis elements of every GC slice with v <= 4, e <= 6, k = 0.
fn chain_map_inputs() -> Result<Vec<(ColoredGraph, i64)>, String> {
    let mut out = Vec::new();
    for n in PARITIES {
        for v in 1..=4 {
            for e in 0..=6 {
                let slice = enumerate_basis(&SliceParams::new(v, e, 0, n, Constraints::gc())).map_err(|e| e.to_string())?;
                out.extend(slice.basis.into_iter().map(|g| (g, n)));
            }
        }
    }
    Ok(out)
}

fn chain_map() -> Outcome {
    let inputs = chain_map_inputs()?;
    for (g, n) in &inputs {
        let report = verify_chain_map(g, Parity::of(*n)).map_err(|e| e.to_string())?;
        if !report.native_ok() {
            return Err(format!("native mismatch on {g} (n={n})"));
        }
        if !report.expanded_ok() {
            return Err(format!("expanded mismatch on {g} (n={n})"));
        }
    }
    Ok(format!("{} basis elements, native and expanded equal", inputs.len()))
}

fn quasi_isomorphism() -> Outcome {
    let mut degrees = 0;
    let mut k4_seen = false;
    for b in 1..=2 {
        for n in PARITIES {
            let report = quasi_iso_check(b, 0, n, (2 * b) as usize).map_err(|e| e.to_string())?;
            if let Some(row) = report.rows.iter().find(|r| !r.ok()) {
                return Err(format!("b={b} n={n}: {row:?}"));
            }
            degrees += report.rows.len();
            if b == 2 && n % 2 == 0 {
                k4_seen = report.rows.iter().any(|r| r.v == Some(4) && r.source_dim >= 1 && r.induced_rank == r.source_dim);
            }
        }
    }
    if !k4_seen {
        return Err("K4 class does not map to a nonzero homology class".into());
    }
    Ok(format!("{degrees} degrees with equal dims and iso on homology; K4 class maps nonzero"))
}

fn min_valence() -> Outcome {
    let mut rows = 0;
    for k in 0..=1 {
        for n in PARITIES {
            for b in -1..=1 {
                let full = graph_homology(b, k, n, Constraints::full(), 1, 5).map_err(|e| e.to_string())?;
                let min2 = graph_homology(b, k, n, Constraints::min2(), 1, 5).map_err(|e| e.to_string())?;
                for (f, m) in full.iter().zip(&min2) {
                    if (f.v, f.dim) != (m.v, m.dim) {
                        return Err(format!("k={k} n={n} b={b} v={}: {} vs {}", f.v, f.dim, m.dim));
                    }
                }
                if full.len() != min2.len() {
                    return Err(format!("k={k} n={n} b={b}: row counts differ"));
                }
                rows += full.len();
            }
        }
    }
    Ok(format!("{rows} slices with equal homology"))
}

fn quotient_acyclicity() -> Outcome {
    let mut pieces = 0;
    for family in [SpecialFamily::Tadpole, SpecialFamily::MultiEdge] {
        // with k = 0 every skeleton vertex is at least 3-valent, so v <= 2b
        for b in 1..=2 {
            let cx = SpecialComplex::build(b, 0, 3, family, 4).map_err(|e| e.to_string())?;
            if !cx.complex.square_zero_failures().is_empty() {
                return Err(format!("{family} b={b}: d^2 != 0"));
            }
            let h = cx.complex.homology();
            if let Some(j) = h.iter().position(|&d| d != 0) {
                return Err(format!("{family} b={b}: H = {} at {} expanded vertices", h[j], cx.pieces[j].expanded_vertices));
            }
            pieces += h.len();
        }
    }
    Ok(format!("{pieces} pieces with zero homology"))
}

fn random_graph(rng: &mut ChaCha8Rng) -> ColoredGraph {
    loop {
        let v = rng.gen_range(2..=6);
        let k = rng.gen_range(0..=2);
        let e = rng.gen_range(0..=8);
        let edges = (0..e)
            .map(|_| {
                let a = rng.gen_range(0..v);
                let b = (a + rng.gen_range(1..v)) % v;
                Edge::new(a, b, rng.gen_range(0..1u8 << k))
            })
            .collect();
        if let Ok(g) = ColoredGraph::new(v, k, edges) {
            return g;
        }
    }
}

fn random_element(rng: &mut ChaCha8Rng, v: usize, e: usize) -> GroupElement {
    let mut vp: Vec<usize> = (0..v).collect();
    let mut ep: Vec<usize> = (0..e).collect();
    vp.shuffle(rng);
    ep.shuffle(rng);
    GroupElement::new(vp, ep, (0..e).map(|_| rng.gen()).collect()).expect("valid permutations")
}

fn canonicalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut zeros = 0;
    for i in 0..10_000 {
        let g = random_graph(&mut rng);
        let s = random_element(&mut rng, g.vertex_count(), g.edge_count());
        let p = if i % 2 == 0 { Parity::Even } else { Parity::Odd };
        let (image, act_sign) = g.act(&s, p).map_err(|e| e.to_string())?;
        let (a, b) = (g.canonicalize(p), image.canonicalize(p));
        if a.is_zero() != b.is_zero() {
            return Err(format!("zero detection differs on {g} and {image}"));
        }
        match (a.into_parts(), b.into_parts()) {
            (Some((ra, sa)), Some((rb, sb))) => {
                if ra != rb || sb != act_sign * sa {
                    return Err(format!("incoherent classes for {g} under {s:?}"));
                }
            }
            _ => zeros += 1,
        }
    }
    Ok(format!("10000 pairs coherent ({zeros} zero classes)"))
}

fn h_invariants() -> Outcome {
    let inputs = chain_map_inputs()?;
    for (g, n) in &inputs {
        check_h_invariants(g, *n).map_err(|e| format!("{g} (n={n}): {e}"))?;
    }
    Ok(format!("{} inputs, degree 0, b preserved, acyclic in all colors", inputs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 d^2 = 0 (v<=5, e<=8, k<=1, connected and gc; exact)", square_zero),
        ("2 chain map dh = hd (GC v<=4, e<=6, k=0; exact)", chain_map),
        ("3 quasi-isomorphism (b in {1,2}, k=0; exact)", quasi_isomorphism),
        ("4 full vs min-valence-2 homology (b<=1, v<=5, k<=1; exact)", min_valence),
        ("5 tadpole and multi-edge subcomplexes acyclic (skeleton v<=4, N odd; exact)", quotient_acyclicity),
        ("6 canonicalization coherence (10000 random pairs; exact)", canonicalization),
        ("7 h invariants (inputs of 2; exact)", h_invariants),
    ];
    let mut failed = false;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed = true;
                println!("FAIL criterion {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
