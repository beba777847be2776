//! Acceptance suite. Each test prints one `PASS` or `FAIL` line (plus
//! detail lines) and fails when its criterion does not hold.
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads=1`.

mod common;

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use projdesign::designs::{design_report, haar_statistics};
use projdesign::ensembles::{sample_haar_state, sample_haar_unitary};
use projdesign::experiments::{run_to_dir, ExperimentConfig, ResultRecord, RunOptions};
use projdesign::linalg::{reduced_density_a, DimensionSpec, PureState, C64};
use projdesign::projected::build_projected_ensemble;
use projdesign::rmt::{bessel_extremum_times, bessel_zero_times, sample_gue};
use projdesign::weingarten::{
    all_permutations, gram_identity_deviation, haar_monomial, leading_relative_error, partitions,
    weingarten_table, Permutation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use common::{load_config, mean_stderr, run};

fn verdict(name: &str, pass: bool, detail: &str) -> bool {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn sci(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn info(line: &str) {
    println!("     {line}");
}

/// Samples of `f(record)` grouped by `key(record)`, skipping failed trials.
fn collect<K: Ord>(
    records: &[ResultRecord],
    key: impl Fn(&ResultRecord) -> K,
    f: impl Fn(&ResultRecord) -> Option<f64>,
) -> BTreeMap<K, Vec<f64>> {
    let mut m: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.failure.is_none()) {
        if let Some(v) = f(r) {
            m.entry(key(r)).or_default().push(v);
        }
    }
    m
}

fn gap(r: &ResultRecord) -> Option<f64> {
    Some(r.f_k? - r.f_haar?)
}

#[test]
fn e1_bessel_root_decay() {
    let cfg = load_config("e1_bessel_roots.toml");
    assert_eq!(cfg.trials, 32);
    let out = run(&cfg);
    let t1 = bessel_zero_times(1)[0];
    assert!(out.records.iter().all(|r| (r.t.unwrap() - t1).abs() < 1e-12));
    let gaps = collect(&out.records, |r| (r.k, r.n_b), gap);
    let mut pass = true;
    for k in [1usize, 2] {
        let (nb, mean): (Vec<f64>, Vec<f64>) = gaps
            .iter()
            .filter(|((kk, _), _)| *kk == k)
            .map(|((_, n_b), xs)| ((1u64 << n_b) as f64, mean_stderr(xs).0))
            .unzip();
        assert_eq!(nb.len(), 7);
        let slope = common::loglog_slope(&nb, &mean);
        let ok = (-1.3..=-0.7).contains(&slope);
        pass &= ok;
        info(&format!("k={k}: slope {slope:.4} (window [-1.3, -0.7]) {}", if ok { "ok" } else { "out" }));
        info(&format!("k={k}: mean F-F_Haar by n_b=4..10: {}", sci(&mean)));
    }
    let f1 = collect(&out.records, |r| (r.k, r.n_b), |r| r.f_k);
    let (m, se) = mean_stderr(&f1[&(1, 10)]);
    let final_gap = m - 0.5;
    let ok = final_gap <= 0.02;
    pass &= ok;
    info(&format!("n_b=10: mean F^(1) - 1/2 = {final_gap:.3e} ± {se:.1e} (<= 0.02)"));
    assert!(verdict("E1 Bessel-root decay", pass, "slopes and final gap"));
}

#[test]
fn e2_root_specificity() {
    let cfg = load_config("e2_time_scan.toml");
    assert_eq!(cfg.trials, 16);
    let out = run(&cfg);
    let by_t = collect(&out.records, |r| r.t.unwrap().to_bits(), gap);
    let gap_at = |t: f64| -> f64 {
        let (_, xs) = by_t
            .iter()
            .min_by(|a, b| {
                (f64::from_bits(*a.0) - t)
                    .abs()
                    .total_cmp(&(f64::from_bits(*b.0) - t).abs())
            })
            .unwrap();
        mean_stderr(xs).0
    };
    let (lo, hi) = (0.3, 6.0);
    let roots: Vec<f64> = bessel_zero_times(6).into_iter().filter(|t| (lo..=hi).contains(t)).collect();
    let maxima: Vec<f64> = bessel_extremum_times(6)
        .into_iter()
        .filter(|t| *t > roots[0] && *t < roots[roots.len() - 1])
        .collect();
    let mut pass = true;
    for (i, &root) in roots.iter().enumerate() {
        let g_root = gap_at(root);
        // Maxima adjacent to this root, among those between in-range roots.
        let adjacent: Vec<f64> = maxima
            .iter()
            .copied()
            .filter(|m| (i > 0 && *m > roots[i - 1] && *m < root) || (i + 1 < roots.len() && *m > root && *m < roots[i + 1]))
            .collect();
        for m in adjacent {
            let ratio = gap_at(m) / g_root;
            let ok = ratio >= 5.0;
            pass &= ok;
            info(&format!(
                "root t={root:.5} gap {g_root:.4e} vs maximum t={m:.5} gap {:.4e}: ratio {ratio:.3} (>= 5) {}",
                gap_at(m),
                if ok { "ok" } else { "short" }
            ));
        }
    }
    assert!(verdict("E2 root specificity", pass, "gap at roots vs maxima of |J1(2t)/t|"));
}

#[test]
fn e3_two_k_to_k() {
    let cfg = load_config("e3_2k_to_k.toml");
    assert_eq!(cfg.trials, 64);
    let out = run(&cfg);
    let l1 = collect(&out.records, |r| r.n_a, |r| r.l1_exact);
    let mut pass = true;
    let mut prev = f64::INFINITY;
    for (n_a, xs) in &l1 {
        assert_eq!(xs.len(), 64);
        let (m, se) = mean_stderr(xs);
        let bound = 4.0 * 2.0 / ((1u64 << n_a) as f64).sqrt();
        let ok = m <= bound && m < prev;
        pass &= ok;
        info(&format!("n_a={n_a}: mean L1 {m:.4e} ± {se:.1e}, bound {bound:.4}, below previous: {}", m < prev));
        prev = m;
    }
    assert_eq!(l1.len(), 3);
    assert!(verdict("E3 2k->k trace distance", pass, "bound 4k/sqrt(N_A) and strict decrease"));
}

#[test]
fn e6_haar_closed_forms() {
    let cfg = load_config("e6_haar_closed_forms.toml");
    assert_eq!(cfg.trials, 4096);
    let out = run(&cfg);
    let mut pass = true;
    for (metric, exact) in [("qk_mean", true), ("overlap_mean", false)] {
        let samples = collect(&out.records, |r| (r.n_a, r.n_b, r.k), |r| r.extras.get(metric).copied());
        assert_eq!(samples.len(), 12);
        for ((n_a, n_b, k), xs) in samples {
            let hs = haar_statistics(n_a, n_b, k).unwrap();
            let want = if exact { hs.mu_k } else { hs.overlap_moment };
            let (m, se) = mean_stderr(&xs);
            let z = (m - want) / se;
            let ok = z.abs() <= 3.0;
            pass &= ok;
            info(&format!("{metric} (n_a={n_a}, n_b={n_b}, k={k}): {m:.6e} vs {want:.6e}, z = {z:+.2}"));
        }
    }
    let mut worst = 0.0f64;
    for n_a in 1..=4 {
        for n_b in 1..=4 {
            for k in 1..=4usize {
                let hs = haar_statistics(n_a, n_b, k).unwrap();
                let env = hs.jensen_envelope(3.0);
                pass &= hs.exact.jensen_gap <= env;
                worst = worst.max((&hs.exact.jensen_gap / &env).to_f64().unwrap());
            }
        }
    }
    info(&format!("exact Jensen gap / (3k^2/(N_B^k N_A)) on n_a, n_b, k in 1..4: max {worst:.4}"));
    assert!(verdict("E6 Haar closed forms", pass, "MC moments within 3 stderr, exact Jensen envelope"));
}

/// Ten index tuples per size: each `(rows, cols, rows_bar, cols_bar)`.
fn monomial_tuples(n: usize, rng: &mut ChaCha20Rng) -> Vec<[Vec<usize>; 4]> {
    let mut out = Vec::new();
    for (q, count) in [(1usize, 2usize), (2, 4), (3, 4)] {
        let perms = all_permutations(q);
        for c in 0..count {
            let rows: Vec<usize> = (0..q).map(|_| rng.random_range(0..n.min(3))).collect();
            let cols: Vec<usize> = (0..q).map(|_| rng.random_range(0..n.min(3))).collect();
            let sigma = &perms[rng.random_range(0..perms.len())];
            let tau = &perms[rng.random_range(0..perms.len())];
            let rows_bar: Vec<usize> = (0..q).map(|m| rows[sigma.apply(m)]).collect();
            let mut cols_bar: Vec<usize> = (0..q).map(|m| cols[tau.apply(m)]).collect();
            // One tuple per degree whose exact value vanishes.
            if c == count - 1 {
                cols_bar[0] = (cols_bar[0] + 1) % n;
            }
            out.push([rows, cols, rows_bar, cols_bar]);
        }
    }
    out
}

#[test]
fn weingarten_engine() {
    let mut all = true;

    let mut worst = 0.0f64;
    for q in 1..=4 {
        for n in [8, 16] {
            worst = worst.max(gram_identity_deviation(&weingarten_table(q, n).unwrap()).unwrap());
        }
    }
    all &= verdict("Weingarten Gram identity", worst <= 1e-9, &format!("max |Wg·G − I| = {worst:.2e} (q <= 4, N in {{8, 16}})"));

    let samples = 100_000;
    let mut pass = true;
    let mut checks = 0;
    for n in [4usize, 8] {
        let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_0000 + n as u64);
        let tuples = monomial_tuples(n, &mut rng);
        let tables: Vec<_> = (1..=3).map(|q| weingarten_table(q, n).unwrap()).collect();
        let exact: Vec<f64> = tuples
            .iter()
            .map(|[r, c, rb, cb]| haar_monomial(&tables[r.len() - 1], r, c, rb, cb).unwrap())
            .collect();
        let mut acc = vec![Vec::with_capacity(samples); tuples.len()];
        for _ in 0..samples {
            let u = sample_haar_unitary(n, &mut rng).unwrap();
            let m = u.matrix();
            for (a, [r, c, rb, cb]) in acc.iter_mut().zip(&tuples) {
                let mut p = C64::new(1.0, 0.0);
                for i in 0..r.len() {
                    p *= m[(r[i], c[i])] * m[(rb[i], cb[i])].conj();
                }
                a.push(p.re);
            }
        }
        for ((xs, want), tuple) in acc.iter().zip(&exact).zip(&tuples) {
            let (m, se) = mean_stderr(xs);
            let ok = (m - want).abs() <= 3.0 * se + 1e-12;
            pass &= ok;
            checks += 1;
            if !ok {
                info(&format!("N={n} tuple {tuple:?}: MC {m:.5e} ± {se:.1e} vs exact {want:.5e}"));
            }
        }
    }
    all &= verdict("Weingarten Haar-monomial MC", pass, &format!("{checks} tuples, q <= 3, N in {{4, 8}}, {samples} samples"));

    let cfg = load_config("e5_weingarten_k1.toml");
    let out = run(&cfg);
    let diffs = collect(&out.records, |r| r.n_b, |r| r.extras.get("mc_minus_predicted").copied());
    let preds = collect(&out.records, |r| r.n_b, |r| r.extras.get("f1_predicted").copied());
    let mut pass = diffs.len() == 4;
    for (n_b, xs) in &diffs {
        let (m, se) = mean_stderr(xs);
        let z = m / se;
        let ok = z.abs() <= 3.0;
        pass &= ok;
        info(&format!("n_a=1, n_b={n_b}: mean F^(1) {:.6} vs predicted {:.6}, paired z = {z:+.2}", mean_stderr(xs).0 + mean_stderr(&preds[n_b]).0, mean_stderr(&preds[n_b]).0));
    }
    all &= verdict("Weingarten k=1 prediction vs MC", pass, &format!("{} trials per point", cfg.trials));

    let mut pass = true;
    for class in partitions(4) {
        let e: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&n| leading_relative_error(&weingarten_table(4, n).unwrap(), &class).unwrap())
            .collect();
        let ratios = [e[1] / e[0], e[2] / e[1]];
        let ok = ratios.iter().all(|r| (0.25..=0.75).contains(r));
        pass &= ok;
        info(&format!(
            "{}: relative error {:.3e}, {:.3e}, {:.3e} at N=16,32,64; per-doubling ratios {:.4}, {:.4}",
            Permutation::from_cycle_type(&class),
            e[0], e[1], e[2], ratios[0], ratios[1]
        ));
    }
    all &= verdict("Weingarten leading asymptotics", pass, "relative error ratio per doubling in [0.25, 0.75]");
    assert!(all);
}

#[test]
fn e7_gue_diagnostics() {
    let cfg = load_config("e7_gue_diagnostics.toml");
    assert_eq!(cfg.trials, 64);
    let out = run(&cfg);
    let recs = &out.records;
    let mut pass = true;

    // Spectral moments are per draw; take them from one (k, t) slice.
    let k_first = cfg.grid.k[0];
    let t_first = recs.iter().filter_map(|r| r.t).fold(f64::INFINITY, f64::min);
    for (m, cat) in [(2, 1.0), (4, 2.0), (6, 5.0)] {
        let xs: Vec<f64> = recs
            .iter()
            .filter(|r| r.n_a + r.n_b == 10 && r.k == k_first && r.t == Some(t_first))
            .map(|r| r.extras[&format!("moment{m}")])
            .collect();
        assert_eq!(xs.len(), 64);
        let (mean, se) = mean_stderr(&xs);
        let ok = (mean - cat).abs() <= 3.0 * se;
        pass &= ok;
        info(&format!("N=1024: (1/N) tr G^{m} = {mean:.5} ± {se:.1e} vs {cat}"));
    }

    let alpha = collect(recs, |r| (r.n_a + r.n_b, r.t.unwrap().to_bits()), |r| {
        (r.k == k_first).then(|| r.alpha1_re.unwrap())
    });
    let alpha_im = collect(recs, |r| (r.n_a + r.n_b, r.t.unwrap().to_bits()), |r| {
        (r.k == k_first).then(|| r.alpha1_im.unwrap())
    });
    for ((qubits, tb), re) in &alpha {
        let t = f64::from_bits(*tb);
        let n = 1usize << qubits;
        let im = &alpha_im[&(*qubits, *tb)];
        let (mr, sr) = mean_stderr(re);
        let (mi, si) = mean_stderr(im);
        let mean_abs = mr.hypot(mi);
        let se = sr.hypot(si);
        let env = projdesign::rmt::gue_moment_envelope(t, n, cfg.k0).unwrap();
        let ok = mean_abs <= env + 3.0 * se;
        pass &= ok;
        if !ok {
            info(&format!("envelope violated at N={n}, t={t}: {mean_abs:.4e} > {env:.4e} + 3·{se:.1e}"));
        }
        if n == 1024 && [1.0, 2.0, 4.0].contains(&t) {
            let sd = (sr * sr + si * si).sqrt() * (re.len() as f64).sqrt();
            let bound = 2.0 * t / (n as f64).sqrt();
            let ok = sd <= bound;
            pass &= ok;
            info(&format!("concentration N=1024, t={t}: sd {sd:.4e} <= {bound:.4e}"));
        }
    }
    info(&format!("envelope |E alpha_1| <= |J1(2t)/t| + K0 t/N + 3 stderr checked at {} (N, t) points, K0 = {}", alpha.len(), cfg.k0));

    let norms = collect(recs, |r| (r.n_a + r.n_b, r.k, r.t.unwrap().to_bits()), |r| r.one_norm);
    for k in [1usize, 2, 3] {
        let series: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0]
            .iter()
            .map(|t| mean_stderr(&norms[&(10, k, t.to_bits())]).0)
            .collect();
        let decreasing = series.windows(2).all(|w| w[1] < w[0]);
        if k == 1 {
            // |J1(2t)/t| itself is larger at t = 4 than at t = 2.
            info(&format!("k=1 (not asserted, single oscillating term): ||alpha_1||_1 at t=1,2,4,8: {}", sci(&series)));
        } else {
            pass &= decreasing;
            info(&format!("k={k}: ||alpha_k||_1 at t=1,2,4,8: {} decreasing: {decreasing}", sci(&series)));
        }
    }
    assert!(verdict("E7 GUE diagnostics", pass, "Catalan, envelope, concentration, one-norm decay"));
}

fn bell_pairs(n: u32) -> PureState {
    let dims = DimensionSpec::new(n, n).unwrap();
    let mut amps = vec![C64::new(0.0, 0.0); dims.dim()];
    for a in 0..dims.dim_a() {
        amps[a * dims.dim_b() + a] = C64::new(1.0, 0.0);
    }
    PureState::from_unnormalized(amps).unwrap()
}

#[test]
fn deterministic_identities() {
    let mut rng = ChaCha20Rng::seed_from_u64(20240608);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let (n_a, n_b) = (1 + i % 3, 1 + (i / 3) % 4);
        let dims = DimensionSpec::new(n_a as u32, n_b as u32).unwrap();
        let psi = if i % 2 == 0 {
            sample_haar_state(dims.dim(), &mut rng).unwrap()
        } else {
            let g = sample_gue(dims.dim(), &mut rng).unwrap();
            g.decomposition().evolve(0.37 * i as f64, &PureState::basis(dims.dim(), 0).unwrap()).unwrap()
        };
        let rho = reduced_density_a(&psi, dims).unwrap();
        let m = rho.matrix();
        let purity: f64 = (0..m.nrows())
            .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
            .map(|(r, c)| m[(r, c)].norm_sqr())
            .sum();
        let ens = build_projected_ensemble(&psi, dims).unwrap();
        let f1 = design_report(&ens, 1, false).unwrap().frame_potential;
        worst = worst.max((f1 - purity).abs());
    }
    let mut all = verdict("F^(1) = purity", worst <= 1e-10, &format!("max deviation {worst:.2e} over 100 states"));

    let bell = bell_pairs(1);
    let ens = build_projected_ensemble(&bell, DimensionSpec::new(1, 1).unwrap()).unwrap();
    let r1 = design_report(&ens, 1, true).unwrap();
    let r2 = design_report(&ens, 2, true).unwrap();
    let ok = r1.delta == 0.0 && (r2.frame_potential - 0.5).abs() < 1e-12 && (r2.haar_frame_potential - 1.0 / 3.0).abs() < 1e-15;
    all &= verdict(
        "Bell projected ensemble",
        ok,
        &format!("Delta^(1) = {}, F^(2) = {:.15}, F_Haar^(2) = {:.15}", r1.delta, r2.frame_potential, r2.haar_frame_potential),
    );

    let mut cases = 0;
    let mut pass = true;
    let mut rng = ChaCha20Rng::seed_from_u64(20240609);
    for n_a in 1..=3u32 {
        for n_b in 1..=4u32 {
            let dims = DimensionSpec::new(n_a, n_b).unwrap();
            let states = [
                sample_haar_state(dims.dim(), &mut rng).unwrap(),
                {
                    let g = sample_gue(dims.dim(), &mut rng).unwrap();
                    g.decomposition().evolve(1.9, &PureState::basis(dims.dim(), 0).unwrap()).unwrap()
                },
            ];
            for psi in states.iter().chain((n_a == n_b).then(|| bell_pairs(n_a)).iter()) {
                let ens = build_projected_ensemble(psi, dims).unwrap();
                for k in 1..=3usize {
                    if (1usize << n_a).pow(k as u32) > 512 {
                        continue;
                    }
                    let rep = design_report(&ens, k, true).unwrap();
                    pass &= rep.l1_exact.unwrap() <= rep.delta + 1e-9;
                    cases += 1;
                }
            }
        }
    }
    all &= verdict("l1_exact <= Delta", pass, &format!("{cases} materialized cases"));
    assert!(all);
}

#[test]
fn reproducible_across_thread_counts() {
    let text = r#"
experiment = "E1_bessel_roots"
trials = 6
seed = 99
[grid]
n_a = [1, 2]
n_b = [3, 4]
k = [1, 2]
t = ["bessel_root(1)", 0.75]
"#;
    let mut bytes = Vec::new();
    for threads in [1usize, 4] {
        let dir = common::tempdir();
        let mut cfg = ExperimentConfig::from_toml_str(text).unwrap();
        cfg.output_dir = dir.path().to_path_buf();
        run_to_dir(&cfg, &RunOptions { threads, quiet: true }).unwrap();
        bytes.push(std::fs::read(dir.path().join("results.csv")).unwrap());
    }
    let same = bytes[0] == bytes[1];
    assert!(verdict(
        "Reproducibility",
        same,
        &format!("results.csv with 1 and 4 threads: {} and {} bytes, identical: {same}", bytes[0].len(), bytes[1].len())
    ));
}
