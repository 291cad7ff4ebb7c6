//! End-to-end acceptance checks. Each test prints a single PASS/FAIL line
//! for its numbered criterion.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ising_lb::bounds;
use ising_lb::ensembles::{
    self, build_dregular, build_edge_bounded, build_girth, build_path_length,
    build_path_restricted, validate_ensemble, EnsembleKind, HardEnsemble,
};
use ising_lb::er;
use ising_lb::experiment::{
    result_to_csv, run_experiment_with_caps, write_result_json, Decoder, ErrorMetric,
    ExperimentConfig,
};
use ising_lb::ising::{
    infer_exact_with_caps, kl_exact_with_caps, symmetric_kl_edge_form_with_caps, Caps, IsingModel,
};
use ising_lb::paths::max_disjoint_paths;
use ising_lb::sampling::sample_exact_with_caps;
use ising_lb::Graph;

const CAPS: Caps = Caps {
    enumeration: 24,
    sampling: 20,
};

fn report(number: u32, label: &str, body: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("criterion {number:2} ({label}): PASS"),
        Err(e) => {
            println!("criterion {number:2} ({label}): FAIL");
            resume_unwind(e);
        }
    }
}

fn random_graph(rng: &mut ChaCha8Rng, p: usize, density: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..p {
        for v in (u + 1)..p {
            if rng.gen::<f64>() < density {
                edges.push((u, v));
            }
        }
    }
    Graph::new(p, edges).unwrap()
}

#[test]
fn criterion_01_two_spin_closed_forms() {
    report(1, "two-spin closed forms", || {
        for lambda in [0.1, 0.5, 1.0, 2.0] {
            let edge = IsingModel::new(Graph::new(2, [(0, 1)]).unwrap(), lambda).unwrap();
            let empty = IsingModel::new(Graph::empty(2).unwrap(), lambda).unwrap();
            let inf = infer_exact_with_caps(&edge, CAPS).unwrap();
            assert!((inf.correlation(0, 1) - lambda.tanh()).abs() < 1e-12);
            let kl = kl_exact_with_caps(&edge, &empty, CAPS).unwrap();
            let expect = lambda * lambda.tanh() - lambda.cosh().ln();
            assert!(
                (kl - expect).abs() < 1e-12,
                "lambda {lambda}: kl {kl} vs {expect}"
            );
        }
    });
}

#[test]
fn criterion_02_symmetric_kl_identity() {
    report(2, "symmetric KL edge-form identity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51ab);
        for case in 0..100 {
            let p = rng.gen_range(2..=8);
            let g1 = random_graph(&mut rng, p, 0.4);
            let g2 = random_graph(&mut rng, p, 0.4);
            let lambda = [0.1, 0.5, 1.0][case % 3];
            let m1 = IsingModel::new(g1, lambda).unwrap();
            let m2 = IsingModel::new(g2, lambda).unwrap();
            let sym = symmetric_kl_edge_form_with_caps(&m1, &m2, CAPS).unwrap();
            let direct = kl_exact_with_caps(&m1, &m2, CAPS).unwrap()
                + kl_exact_with_caps(&m2, &m1, CAPS).unwrap();
            assert!((sym - direct).abs() < 1e-9, "case {case}: {sym} vs {direct}");
        }
    });
}

#[test]
fn criterion_03_correlation_bound_dominance_and_tightness() {
    report(3, "correlation bound dominance and 2-path tightness", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0a3);
        for _ in 0..100 {
            let p = rng.gen_range(3..=10);
            let g = random_graph(&mut rng, p, 0.35);
            let lambda = rng.gen_range(0.1..1.2);
            let inf =
                infer_exact_with_caps(&IsingModel::new(g.clone(), lambda).unwrap(), CAPS).unwrap();
            for a in 0..p {
                for b in (a + 1)..p {
                    for l in 1..=4usize {
                        let (d, _) = max_disjoint_paths(&g, a, b, l).unwrap();
                        if d == 0 {
                            continue;
                        }
                        let bound = bounds::corr_lower_bound_ld(lambda, l, d).unwrap();
                        assert!(
                            inf.correlation(a, b) >= bound - 1e-10,
                            "({a},{b}) l={l} d={d}"
                        );
                    }
                }
            }
        }
        // two-path graph: the (2,1) bound is exactly tanh^2
        for lambda in [0.2f64, 0.7, 1.5] {
            let bound = bounds::corr_lower_bound_ld(lambda, 2, 1).unwrap();
            assert!((bound - lambda.tanh().powi(2)).abs() < 1e-12);
        }
    });
}

#[test]
fn criterion_04_hamming1_bound_dominance() {
    report(4, "single-edge-difference divergence bound", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4a11);
        let mut done = 0;
        while done < 200 {
            let p = rng.gen_range(2..=8);
            let g = random_graph(&mut rng, p, 0.4);
            let u = rng.gen_range(0..p);
            let v = rng.gen_range(0..p);
            if u == v || g.has_edge(u, v) {
                continue;
            }
            done += 1;
            let lambda = rng.gen_range(0.1..1.5);
            let bigger = g.with_edge(u, v).unwrap();
            let m_small = IsingModel::new(g, lambda).unwrap();
            let m_big = IsingModel::new(bigger, lambda).unwrap();
            let c_small = infer_exact_with_caps(&m_small, CAPS).unwrap().correlation(u, v);
            let c_big = infer_exact_with_caps(&m_big, CAPS).unwrap().correlation(u, v);
            assert!(c_big - c_small <= lambda.tanh() + 1e-10);
            let cap = lambda * lambda.tanh() + 1e-10;
            assert!(kl_exact_with_caps(&m_big, &m_small, CAPS).unwrap() <= cap);
            assert!(kl_exact_with_caps(&m_small, &m_big, CAPS).unwrap() <= cap);
        }
    });
}

#[test]
fn criterion_05_griffiths_monotonicity() {
    report(5, "correlations monotone under edge addition", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9f15);
        let mut done = 0;
        while done < 100 {
            let p = rng.gen_range(2..=8);
            let g = random_graph(&mut rng, p, 0.4);
            let u = rng.gen_range(0..p);
            let v = rng.gen_range(0..p);
            if u == v || g.has_edge(u, v) {
                continue;
            }
            done += 1;
            let lambda = rng.gen_range(0.1..1.5);
            let before =
                infer_exact_with_caps(&IsingModel::new(g.clone(), lambda).unwrap(), CAPS).unwrap();
            let after = infer_exact_with_caps(
                &IsingModel::new(g.with_edge(u, v).unwrap(), lambda).unwrap(),
                CAPS,
            )
            .unwrap();
            for s in 0..p {
                for t in (s + 1)..p {
                    assert!(after.correlation(s, t) >= before.correlation(s, t) - 1e-10);
                }
            }
        }
    });
}

fn audit(e: &HardEnsemble) {
    let report = validate_ensemble(e);
    assert!(
        report.is_clean(),
        "{:?}/{:?}: {:?}",
        e.class_tag,
        e.kind,
        report.violations
    );
    assert_eq!(e.members.len(), ensembles::expected_member_count(e));
    // exact KL dominance, including p > 12 where validate_ensemble skips it
    let center = IsingModel::new(e.center.clone(), e.lambda).unwrap();
    for (i, m) in e.members.iter().enumerate() {
        let member = IsingModel::new(m.clone(), e.lambda).unwrap();
        let kl = kl_exact_with_caps(&member, &center, CAPS).unwrap();
        assert!(
            kl <= e.rho + 1e-9,
            "{:?}/{:?} member {i}: KL {kl} > rho {}",
            e.class_tag,
            e.kind,
            e.rho
        );
    }
}

#[test]
fn criterion_06_construction_audits() {
    report(6, "hard-family construction audits", || {
        let lambda = 0.5;
        for kind in [EnsembleKind::Connectivity, EnsembleKind::Hamming1] {
            audit(&build_path_restricted(10, 4, lambda, kind).unwrap());
            audit(&build_path_length(14, 2, 2, 0.3, lambda, kind).unwrap());
            audit(&build_girth(14, 4, 3, 0.3, lambda, kind).unwrap());
        }
        audit(&build_dregular(12, 3, lambda).unwrap());
        audit(&build_edge_bounded(8, 10, lambda).unwrap());
    });
}

#[test]
fn criterion_07_empirical_fano_floor() {
    report(7, "empirical error respects the Fano floor", || {
        let e = build_dregular(12, 3, 0.5).unwrap();
        let family = e.members.len() as f64;
        // exact radius, then pick n so the exact floor sits near 0.3
        let center = IsingModel::new(e.center.clone(), e.lambda).unwrap();
        let rho_exact = e
            .members
            .iter()
            .map(|m| {
                kl_exact_with_caps(&IsingModel::new(m.clone(), e.lambda).unwrap(), &center, CAPS)
                    .unwrap()
            })
            .fold(0.0f64, f64::max);
        let n = (((1.0 - 0.3) * family.ln() - 2.0f64.ln()) / rho_exact).round() as usize;
        let cfg = ExperimentConfig {
            ensemble_dir: None,
            sample_sizes: vec![n],
            trials: 1000,
            seed: 2024,
            decoder: Decoder::MlExact,
            error_metric: ErrorMetric::Avg,
        };
        let r = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        let row = &r.rows[0];
        assert!((row.fano_floor_exact - 0.3).abs() < 0.05, "floor off target");
        // three Wilson standard errors below the floor at worst
        let se = (row.ci_high - row.ci_low) / (2.0 * 1.96);
        assert!(
            row.p_hat >= row.fano_floor_exact - 3.0 * se,
            "p_hat {} below floor {} - 3se ({se})",
            row.p_hat,
            row.fano_floor_exact
        );
    });
}

#[test]
fn criterion_08_threshold_calculators_vs_reference() {
    report(8, "threshold calculators match high-precision reference", || {
        // frozen outputs of tools/gen_reference_values.py (mpmath, 60 digits)
        let tol = 5e-10;
        let check = |r: bounds::BoundReport, reference: f64, winner: &str| {
            assert!(
                (r.n_threshold / reference - 1.0).abs() < tol,
                "{} vs {reference}",
                r.n_threshold
            );
            assert_eq!(r.winning_term, winner);
        };
        check(
            bounds::threshold_path_restricted(1000, 3, 0.2, 0.1).unwrap(),
            141.68811182185108,
            "hamming-term",
        );
        check(
            bounds::threshold_path_restricted(500, 5, 0.4, 0.2).unwrap(),
            29.064224232060356,
            "hamming-term",
        );
        check(
            bounds::threshold_path_restricted(200, 2, 1.0, 0.05).unwrap(),
            7.9319845818474355,
            "connectivity-term",
        );
        check(
            bounds::threshold_path_length(10_000, 2, 3, 0.5, 0.1, 0.1).unwrap(),
            769.10084336694978,
            "hamming-term",
        );
        check(
            bounds::threshold_path_length(1000, 3, 2, 0.4, 0.8, 0.1).unwrap(),
            569146783.54167517,
            "connectivity-term",
        );
        check(
            bounds::threshold_path_length(5000, 2, 4, 0.6, 0.2, 0.05).unwrap(),
            188.29212542489981,
            "hamming-term",
        );
        check(
            bounds::threshold_girth(10_000, 5, 4, 0.5, 0.2, 0.1).unwrap(),
            194.18521686348646,
            "hamming-term",
        );
        check(
            bounds::threshold_girth(1000, 3, 6, 0.5, 0.5, 0.1).unwrap(),
            45.072905855288677,
            "connectivity-term",
        );
        check(
            bounds::threshold_girth(500, 4, 3, 0.3, 0.3, 0.2).unwrap(),
            50.543282891374108,
            "hamming-term",
        );
        check(
            bounds::threshold_dregular(1000, 9, 0.3, 0.1).unwrap(),
            79.488684992804329,
            "hamming-term",
        );
        check(
            bounds::threshold_dregular(1000, 3, 0.1, 0.1).unwrap(),
            597.79128779475648,
            "hamming-term",
        );
        check(
            bounds::threshold_dregular(200, 5, 1.0, 0.2).unwrap(),
            24.116924127646818,
            "connectivity-term",
        );
        check(
            bounds::threshold_edge_bounded(2000, 50, 0.3, 0.1).unwrap(),
            33.148676239376006,
            "hamming-term",
        );
        check(
            bounds::threshold_edge_bounded(2000, 9, 0.5, 0.1).unwrap(),
            5.8585561511060962,
            "hamming-term",
        );
        check(
            bounds::threshold_edge_bounded(2000, 1000, 0.2, 0.05).unwrap(),
            1658.3964792890822,
            "connectivity-term",
        );
    });
}

#[test]
fn criterion_09_er_module() {
    report(9, "dense random-graph module", || {
        assert_eq!(er::binary_entropy(0.5).unwrap(), 1.0);
        let params = er::ERParams {
            p: 36,
            c: 12.0,
            lambda: 0.5,
            p_avg_target: 0.01,
            epsilon: 0.5,
        };
        let (b_p, r_c) = er::er_concentration_constants(&params);
        assert!((b_p - 12.0 * (-1.0f64).exp()).abs() < 1e-12);
        assert!((r_c - 2.0 * (-1.0f64).exp()).abs() < 1e-12);

        // boundary lambda = sqrt(p)/c classifies high exactly
        let mut q = er::ERParams {
            p: 100,
            c: 50.0,
            lambda: 0.2,
            p_avg_target: 0.01,
            epsilon: 0.5,
        };
        assert_eq!(er::er_regime(&q), er::Regime::HighLambda);
        q.lambda = 0.2 - 1e-12;
        assert_eq!(er::er_regime(&q), er::Regime::LowLambda);

        // dense diagnostics: per-pair mean path count across 20 seeds
        let (p, c) = (300usize, 72.0f64);
        let part = p / 3;
        let gamma = c * c / (6.0 * p as f64);
        let expected_mean = c * c / (3.0 * p as f64);
        let seeds = 20u64;
        let mut pair_sums = vec![0u64; part * part];
        for seed in 0..seeds {
            let g = er::sample_er_graph(p, c, seed).unwrap();
            let adj = g.adjacency();
            for (ai, a) in (0..part).enumerate() {
                for (ci, cc) in ((2 * part)..(3 * part)).enumerate() {
                    let n_ac = adj[a]
                        .iter()
                        .filter(|&&w| {
                            w >= part && w < 2 * part && adj[w].binary_search(&cc).is_ok()
                        })
                        .count() as u64;
                    pair_sums[ai * part + ci] += n_ac;
                }
            }
            // cross-check against the module's own aggregate
            let diag = er::er_structure_diagnostics(&g, c, 0.5, None);
            assert!(diag.typical, "seed {seed} not typical");
        }
        let grand_mean =
            pair_sums.iter().sum::<u64>() as f64 / (seeds as f64 * pair_sums.len() as f64);
        assert!(
            (grand_mean / expected_mean - 1.0).abs() < 0.05,
            "mean {grand_mean} vs {expected_mean}"
        );
        let above = pair_sums
            .iter()
            .filter(|&&s| s as f64 / seeds as f64 >= gamma)
            .count();
        let fraction = above as f64 / pair_sums.len() as f64;
        assert!(fraction >= 0.99, "fraction {fraction}");
    });
}

#[test]
fn criterion_10_determinism() {
    report(10, "byte-identical reruns under a fixed seed", || {
        // ensemble serialization
        let dir = tempfile::tempdir().unwrap();
        let (d1, d2) = (dir.path().join("e1"), dir.path().join("e2"));
        let e = build_dregular(8, 3, 0.5).unwrap();
        ensembles::write_ensemble_dir(&e, &d1).unwrap();
        ensembles::write_ensemble_dir(&build_dregular(8, 3, 0.5).unwrap(), &d2).unwrap();
        for name in ["center.edgelist", "member_7.edgelist", "manifest.json"] {
            assert_eq!(
                std::fs::read(d1.join(name)).unwrap(),
                std::fs::read(d2.join(name)).unwrap()
            );
        }

        // sampling
        let m = IsingModel::new(e.center.clone(), 0.5).unwrap();
        let s1 = sample_exact_with_caps(&m, 64, 9, CAPS).unwrap();
        let s2 = sample_exact_with_caps(&m, 64, 9, CAPS).unwrap();
        assert_eq!(s1.to_text(), s2.to_text());

        // experiment outputs, CSV and JSON
        let cfg = ExperimentConfig {
            ensemble_dir: None,
            sample_sizes: vec![3, 6],
            trials: 50,
            seed: 77,
            decoder: Decoder::MlExact,
            error_metric: ErrorMetric::Avg,
        };
        let r1 = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        let r2 = run_experiment_with_caps(&e, &cfg, CAPS).unwrap();
        assert_eq!(result_to_csv(&r1), result_to_csv(&r2));
        let (j1, j2) = (dir.path().join("r1.json"), dir.path().join("r2.json"));
        write_result_json(&r1, &j1).unwrap();
        write_result_json(&r2, &j2).unwrap();
        assert_eq!(std::fs::read(j1).unwrap(), std::fs::read(j2).unwrap());
    });
}
