//! Determinism, node accounting and region handling of the quadrature
//! layer, exercised through the real integrands.

use std::sync::atomic::{AtomicUsize, Ordering};

use critline::jet::JetShape;
use critline::mollifier::{MollifierConfig, TermGrids};
use critline::quadrature::{integrate_c12_region, integrate_cube, GridSpec};
use critline::terms::{self, assemble_node, integrands, Extraction, Params, ResolvedPolys, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

#[test]
fn worker_count_does_not_change_a_single_bit() {
    let mut cfg = MollifierConfig::paper_kappa();
    cfg.grid = TermGrids::uniform(8);
    let serial = pool(1).install(|| terms::eval_all(&cfg).unwrap());
    for threads in [2, 3, 7] {
        let par = pool(threads).install(|| terms::eval_all(&cfg).unwrap());
        assert_eq!(par.c_total.to_bits(), serial.c_total.to_bits());
        for t in Term::ALL {
            assert_eq!(par.get(t).value.to_bits(), serial.get(t).value.to_bits(), "{}", t.name());
        }
    }
}

#[test]
fn every_node_is_visited_once_per_resolution() {
    for (dims, n) in [(1, 24), (2, 9), (3, 6), (4, 5), (5, 4)] {
        let calls = AtomicUsize::new(0);
        let spec = GridSpec::new(dims, n).unwrap();
        let coarse = spec.coarser().total_nodes();
        pool(4).install(|| {
            integrate_cube(
                |_: &[f64]| {
                    calls.fetch_add(1, Ordering::Relaxed);
                    1.0
                },
                &spec,
            )
            .unwrap()
        });
        assert_eq!(calls.load(Ordering::Relaxed), n.pow(dims as u32) + coarse);
        assert_eq!(spec.total_nodes(), n.pow(dims as u32));
    }
}

#[test]
fn refinement_delta_shrinks_when_nodes_double() {
    for cfg in [MollifierConfig::paper_kappa(), MollifierConfig::paper_kappa_star()] {
        for term in Term::ALL {
            let g = term.grid(&cfg.grid);
            let delta = |n| {
                terms::eval_term_with(&cfg, term, &g.with_nodes(n), Extraction::default())
                    .unwrap()
                    .refinement_delta
            };
            let (d4, d8) = (delta(4), delta(8));
            assert!(d8 <= d4, "{}: {d8:e} > {d4:e}", term.name());
        }
    }
}

#[test]
fn c12_region_agrees_with_rejection_sampling() {
    let cfg = MollifierConfig::paper_kappa();
    let params = Params::of(&cfg);
    let polys = ResolvedPolys::of(&cfg);
    let roles = Term::C12.p_roles().unwrap();
    let shape = JetShape::new(Term::C12.jet_orders()).unwrap();
    let f = |t1: f64, t2: f64, u: f64| {
        assemble_node(&integrands::c12_node(&params, &shape, &[t1, t2, u]), &polys, roles)
            .extract_top()
    };
    let quad = integrate_c12_region(f, &GridSpec::new(3, 24).unwrap()).unwrap().value;

    // 10^7 rejection samples, ten in each of 100^3 cells of the unit cube
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (m, per_cell) = (100usize, 10usize);
    let h = 1.0 / m as f64;
    let cell_vol = h * h * h;
    let (mut mean, mut var) = (0.0, 0.0);
    for cell in 0..m * m * m {
        let (i, j, k) = (cell / (m * m), (cell / m) % m, cell % m);
        if (i + j) as f64 * h > (k + 1) as f64 * h {
            continue; // cell lies outside t1 + t2 <= u
        }
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..per_cell {
            let t1 = (i as f64 + rng.gen::<f64>()) * h;
            let t2 = (j as f64 + rng.gen::<f64>()) * h;
            let u = (k as f64 + rng.gen::<f64>()) * h;
            let v = if t1 + t2 <= u { f(t1, t2, u) } else { 0.0 };
            s += v;
            s2 += v * v;
        }
        let n = per_cell as f64;
        let cm = s / n;
        mean += cell_vol * cm;
        var += cell_vol * cell_vol * (s2 / n - cm * cm) / (n - 1.0);
    }
    let se = var.sqrt();
    let rel = ((mean - quad) / quad).abs();
    println!("quadrature {quad:.8e}, Monte Carlo {mean:.8e} ± {se:.1e}, rel {rel:.1e}");
    assert!(rel < 5e-4, "3 significant digits");
    assert!(se < 1.5e-4 * quad.abs());
    assert!((mean - quad).abs() < 4.0 * se);
}
