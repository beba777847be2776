//! Parallel, seeded execution of an experiment grid.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::{BasisName, ExperimentConfig, ExperimentKind, SpectrumName};
use super::record::{to_csv, ResultRecord};
use super::summary::{build_summary, Summary};
use crate::designs::{design_report, frame_potential, haar_frame_potential};
use crate::ensembles::{
    apply_structured, dft_unitary, sample_haar_state, sample_haar_unitary, sample_spectrum,
    SpectrumKind, SpectrumSpec,
};
use crate::error::{Error, Result};
use crate::linalg::{DimensionSpec, PureState, UnitaryOperator, C64};
use crate::projected::{build_projected_ensemble, unnormalized_branches};
use crate::rmt::{sample_gue, sample_gue_spectrum, spectral_moment, trace_moments_from_spectrum};
use crate::weingarten::ProjectedF1Predictor;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    pub quiet: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<ResultRecord>,
    pub summary: Summary,
}

impl RunOutput {
    pub fn csv(&self) -> String {
        to_csv(&self.records)
    }
}

/// RNG stream for one trial at one system size. Keyed by the sampled
/// object's coordinates rather than the grid index, so every `k` and `t`
/// at a given `(n_a, n_b, trial)` sees the same global sample.
pub fn trial_stream(kind: ExperimentKind, n_a: u32, n_b: u32, trial: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(kind.id().to_le_bytes());
    h.update(n_a.to_le_bytes());
    h.update(n_b.to_le_bytes());
    h.update((trial as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

pub fn trial_rng(seed: u64, kind: ExperimentKind, n_a: u32, n_b: u32, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial_stream(kind, n_a, n_b, trial));
    rng
}

/// Metrics of one grid point in one trial.
#[derive(Debug, Clone, Default)]
struct Metrics {
    f_k: Option<f64>,
    f_haar: Option<f64>,
    delta_sq: Option<f64>,
    l1_exact: Option<f64>,
    alpha1: Option<C64>,
    one_norm: Option<f64>,
    extras: BTreeMap<String, f64>,
}

/// Grid layout shared by all trials.
struct Plan {
    dims: Vec<(u32, u32)>,
    ks: Vec<usize>,
    ts: Vec<Option<f64>>,
}

impl Plan {
    fn grid_index(&self, d: usize, ki: usize, ti: usize) -> usize {
        (d * self.ks.len() + ki) * self.ts.len() + ti
    }
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    plan: &'a Plan,
    predictors: Vec<Option<ProjectedF1Predictor>>,
}

/// Runs every trial of every grid point and summarizes. Does no file I/O.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutput> {
    cfg.validate()?;
    let times = cfg.times()?;
    let plan = Plan {
        dims: cfg.dims(),
        ks: cfg.grid.k.clone(),
        ts: if times.is_empty() {
            vec![None]
        } else {
            times.into_iter().map(Some).collect()
        },
    };
    let predictors = plan
        .dims
        .iter()
        .map(|&(n_a, n_b)| {
            if cfg.experiment != ExperimentKind::WeingartenK1 {
                return Ok(None);
            }
            let dims = DimensionSpec::new(n_a, n_b)?;
            Ok(Some(ProjectedF1Predictor::new(&PureState::basis(dims.dim(), 0)?, dims)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let ctx = Context {
        cfg,
        plan: &plan,
        predictors,
    };

    let units: Vec<(usize, usize)> = (0..plan.dims.len())
        .flat_map(|d| (0..cfg.trials).map(move |trial| (d, trial)))
        .collect();
    let done = AtomicUsize::new(0);
    let total = units.len();
    let work = || {
        units
            .par_iter()
            .map(|&(d, trial)| {
                let out = run_unit(&ctx, d, trial);
                let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                if !opts.quiet && (n == total || n.is_multiple_of((total / 10).max(1))) {
                    eprintln!("{}: {n}/{total} trials", cfg.experiment);
                }
                out
            })
            .collect::<Vec<_>>()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
    let per_unit = pool.install(work);

    let mut records: Vec<ResultRecord> = per_unit.into_iter().flatten().collect();
    records.sort_by_key(|r| (r.grid_index, r.trial));
    let summary = build_summary(cfg, cfg.seed, &records)?;
    Ok(RunOutput { records, summary })
}

/// All grid points of one `(dims, trial)` pair. A failure while sampling
/// marks every point of the unit as failed; a failure at one point marks
/// only that record.
fn run_unit(ctx: &Context, d: usize, trial: usize) -> Vec<ResultRecord> {
    let cfg = ctx.cfg;
    let plan = ctx.plan;
    let (n_a, n_b) = plan.dims[d];
    let mut rng = trial_rng(cfg.seed, cfg.experiment, n_a, n_b, trial);
    let mut slots: Vec<Vec<Option<std::result::Result<(Metrics, f64), String>>>> =
        vec![vec![None; plan.ts.len()]; plan.ks.len()];
    let outcome = DimensionSpec::new(n_a, n_b).and_then(|dims| {
        let mut emit = |ki: usize, ti: usize, f: &mut dyn FnMut() -> Result<Metrics>| {
            let start = Instant::now();
            let m = f();
            let ms = start.elapsed().as_secs_f64() * 1e3;
            slots[ki][ti] = Some(m.map(|m| (m, ms)).map_err(|e| e.to_string()));
        };
        match cfg.experiment {
            ExperimentKind::BesselRoots | ExperimentKind::TimeScan => {
                gue_evolution(cfg, plan, dims, &mut rng, &mut emit)
            }
            ExperimentKind::TwoKToK => haar_designs(cfg, plan, dims, &mut rng, &mut emit),
            ExperimentKind::Structured | ExperimentKind::WeingartenK1 => structured(
                cfg,
                plan,
                dims,
                ctx.predictors[d].as_ref(),
                &mut rng,
                &mut emit,
            ),
            ExperimentKind::HaarClosedForms => haar_closed_forms(plan, dims, &mut rng, &mut emit),
            ExperimentKind::GueDiagnostics => gue_diagnostics(plan, dims, &mut rng, &mut emit),
        }
    });

    let mut out = Vec::with_capacity(plan.ks.len() * plan.ts.len());
    for (ki, &k) in plan.ks.iter().enumerate() {
        for (ti, &t) in plan.ts.iter().enumerate() {
            let mut r = ResultRecord {
                experiment: cfg.experiment,
                trial,
                seed: cfg.seed,
                grid_index: plan.grid_index(d, ki, ti),
                n_a,
                n_b,
                k,
                t,
                f_k: None,
                f_haar: None,
                delta_sq: None,
                l1_exact: None,
                alpha1_re: None,
                alpha1_im: None,
                one_norm: None,
                wall_ms: None,
                extras: BTreeMap::new(),
                failure: None,
            };
            let slot = slots[ki][ti].take();
            match (&outcome, slot) {
                (Err(e), _) => r.failure = Some(e.to_string()),
                (Ok(()), Some(Err(e))) => r.failure = Some(e),
                (Ok(()), None) => r.failure = Some("grid point was not evaluated".into()),
                (Ok(()), Some(Ok((m, ms)))) => {
                    r.f_k = m.f_k;
                    r.f_haar = m.f_haar;
                    r.delta_sq = m.delta_sq;
                    r.l1_exact = m.l1_exact;
                    r.alpha1_re = m.alpha1.map(|a| a.re);
                    r.alpha1_im = m.alpha1.map(|a| a.im);
                    r.one_norm = m.one_norm;
                    r.extras = m.extras;
                    if cfg.record_timing {
                        r.wall_ms = Some(ms);
                    }
                    if !r.all_finite() {
                        let r0 = r.clone();
                        r = ResultRecord {
                            f_k: None,
                            f_haar: None,
                            delta_sq: None,
                            l1_exact: None,
                            alpha1_re: None,
                            alpha1_im: None,
                            one_norm: None,
                            wall_ms: None,
                            extras: BTreeMap::new(),
                            failure: Some("non-finite metric".into()),
                            ..r0
                        };
                    }
                }
            }
            out.push(r);
        }
    }
    out
}

type Emit<'a> = dyn FnMut(usize, usize, &mut dyn FnMut() -> Result<Metrics>) + 'a;

fn design_metrics(
    ens: &crate::projected::ProjectedEnsemble,
    k: usize,
    materialize: bool,
) -> Result<Metrics> {
    let rep = design_report(ens, k, materialize)?;
    Ok(Metrics {
        f_k: Some(rep.frame_potential),
        f_haar: Some(rep.haar_frame_potential),
        delta_sq: Some(rep.delta_sq()),
        l1_exact: rep.l1_exact,
        ..Metrics::default()
    })
}

/// E1, E2: `|Φ⟩ = e^{-iGt}|0…0⟩` with one GUE draw shared across the time grid.
fn gue_evolution(
    cfg: &ExperimentConfig,
    plan: &Plan,
    dims: DimensionSpec,
    rng: &mut ChaCha20Rng,
    emit: &mut Emit,
) -> Result<()> {
    let n = dims.dim();
    let g = sample_gue(n, rng)?;
    let phi0 = PureState::basis(n, 0)?;
    for (ti, t) in plan.ts.iter().enumerate() {
        let t = t.expect("validated: time is required");
        let psi = g.decomposition().evolve(t, &phi0)?;
        let ens = build_projected_ensemble(&psi, dims)?;
        for (ki, &k) in plan.ks.iter().enumerate() {
            emit(ki, ti, &mut || {
                let mut m = design_metrics(&ens, k, cfg.materialize_l1())?;
                let tm = trace_moments_from_spectrum(g.spectrum(), t, k)?;
                m.alpha1 = Some(tm.alpha[0]);
                m.one_norm = Some(tm.one_norm);
                Ok(m)
            });
        }
    }
    Ok(())
}

/// E3: Haar-random global states, with the exact trace distance.
fn haar_designs(
    cfg: &ExperimentConfig,
    plan: &Plan,
    dims: DimensionSpec,
    rng: &mut ChaCha20Rng,
    emit: &mut Emit,
) -> Result<()> {
    let psi = sample_haar_state(dims.dim(), rng)?;
    let ens = build_projected_ensemble(&psi, dims)?;
    for (ki, &k) in plan.ks.iter().enumerate() {
        for ti in 0..plan.ts.len() {
            emit(ki, ti, &mut || design_metrics(&ens, k, cfg.materialize_l1()));
        }
    }
    Ok(())
}

fn basis(name: BasisName, n: usize, rng: &mut ChaCha20Rng) -> Result<UnitaryOperator> {
    match name {
        BasisName::Haar => sample_haar_unitary(n, rng),
        BasisName::Identity => Ok(UnitaryOperator::identity(n)),
        BasisName::Dft => Ok(dft_unitary(n)),
    }
}

/// E4, E5: `|Φ⟩ = U D U^† |0…0⟩`. The spectrum is drawn before the basis.
fn structured(
    cfg: &ExperimentConfig,
    plan: &Plan,
    dims: DimensionSpec,
    predictor: Option<&ProjectedF1Predictor>,
    rng: &mut ChaCha20Rng,
    emit: &mut Emit,
) -> Result<()> {
    let n = dims.dim();
    let ens_cfg = cfg.ensemble.clone().unwrap_or(super::config::EnsembleConfig {
        spectrum: SpectrumName::ZeroTracePaired,
        phases: Vec::new(),
        basis: BasisName::Haar,
    });
    enum Base {
        Gue(Vec<f64>),
        Phases(Vec<C64>),
    }
    let base = match ens_cfg.spectrum {
        SpectrumName::GueExp => Base::Gue(sample_gue_spectrum(n, rng)?),
        SpectrumName::ZeroTracePaired => Base::Phases(sample_spectrum(
            &SpectrumSpec::new(SpectrumKind::ZeroTracePaired, n)?,
            rng,
        )?),
        SpectrumName::Fixed => Base::Phases(
            (0..n)
                .map(|j| C64::from_polar(1.0, ens_cfg.phases[j % ens_cfg.phases.len()]))
                .collect(),
        ),
    };
    let u = basis(ens_cfg.basis, n, rng)?;
    let phi0 = PureState::basis(n, 0)?;
    for (ti, t) in plan.ts.iter().enumerate() {
        let d: Vec<C64> = match (&base, t) {
            (Base::Gue(l), Some(t)) => l.iter().map(|x| C64::from_polar(1.0, -x * t)).collect(),
            (Base::Gue(_), None) => unreachable!("validated: gue_exp needs time"),
            (Base::Phases(p), _) => p.clone(),
        };
        let psi = apply_structured(&u, &d, &phi0)?;
        let ens = build_projected_ensemble(&psi, dims)?;
        let alpha1 = d.iter().sum::<C64>() / n as f64;
        for (ki, &k) in plan.ks.iter().enumerate() {
            emit(ki, ti, &mut || {
                let mut m = design_metrics(&ens, k, cfg.materialize_l1())?;
                m.alpha1 = Some(alpha1);
                if let Some(p) = predictor {
                    let predicted = p.predict(&d)?;
                    m.extras.insert("f1_predicted".into(), predicted);
                    m.extras
                        .insert("mc_minus_predicted".into(), m.f_k.unwrap() - predicted);
                }
                Ok(m)
            });
        }
    }
    Ok(())
}

/// E6: weights and branch overlaps of Haar-random global states.
fn haar_closed_forms(
    plan: &Plan,
    dims: DimensionSpec,
    rng: &mut ChaCha20Rng,
    emit: &mut Emit,
) -> Result<()> {
    let psi = sample_haar_state(dims.dim(), rng)?;
    let branches = unnormalized_branches(&psi, dims)?;
    let ens = build_projected_ensemble(&psi, dims)?;
    let q: Vec<f64> = branches
        .iter()
        .map(|b| b.iter().map(|x| x.norm_sqr()).sum())
        .collect();
    // |⟨Φ̃_z₁|Φ̃_z₂⟩|² over unordered pairs z₁ < z₂.
    let mut overlaps = Vec::new();
    for i in 0..branches.len() {
        for j in i + 1..branches.len() {
            let s: C64 = branches[i]
                .iter()
                .zip(&branches[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            overlaps.push(s.norm_sqr());
        }
    }
    for (ki, &k) in plan.ks.iter().enumerate() {
        for ti in 0..plan.ts.len() {
            emit(ki, ti, &mut || {
                let f = frame_potential(&ens, k)?;
                let mut m = Metrics {
                    f_k: Some(f),
                    f_haar: Some(haar_frame_potential(dims.dim_a(), k)),
                    ..Metrics::default()
                };
                let qk = q.iter().map(|x| x.powi(k as i32)).sum::<f64>() / q.len() as f64;
                m.extras.insert("qk_mean".into(), qk);
                if !overlaps.is_empty() {
                    let ov = overlaps.iter().map(|x| x.powi(k as i32)).sum::<f64>()
                        / overlaps.len() as f64;
                    m.extras.insert("overlap_mean".into(), ov);
                }
                Ok(m)
            });
        }
    }
    Ok(())
}

/// E7: normalized trace moments and spectral moments of GUE matrices.
fn gue_diagnostics(
    plan: &Plan,
    dims: DimensionSpec,
    rng: &mut ChaCha20Rng,
    emit: &mut Emit,
) -> Result<()> {
    let spectrum = sample_gue_spectrum(dims.dim(), rng)?;
    let moments: Vec<(String, f64)> = [2u32, 4, 6]
        .iter()
        .map(|&m| (format!("moment{m}"), spectral_moment(&spectrum, m)))
        .collect();
    for (ti, t) in plan.ts.iter().enumerate() {
        let t = t.expect("validated: time is required");
        for (ki, &k) in plan.ks.iter().enumerate() {
            emit(ki, ti, &mut || {
                let tm = trace_moments_from_spectrum(&spectrum, t, k)?;
                Ok(Metrics {
                    alpha1: Some(tm.alpha[0]),
                    one_norm: Some(tm.one_norm),
                    extras: moments.iter().cloned().collect(),
                    ..Metrics::default()
                })
            });
        }
    }
    Ok(())
}

/// sha256 of the config re-serialized in canonical TOML.
pub fn config_hash(cfg: &ExperimentConfig) -> Result<String> {
    let text = toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))?;
    let digest = Sha256::digest(text.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Writes `results.csv`, `summary.json` and `manifest.json` into `dir`.
pub fn write_outputs(cfg: &ExperimentConfig, out: &RunOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::io(format!("cannot create {}", dir.display()), e))?;
    let write = |name: &str, body: &str| {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(format!("cannot write {}", path.display()), e))
    };
    write("results.csv", &out.csv())?;
    write("summary.json", &out.summary.to_json())?;
    let manifest = serde_json::json!({
        "experiment": cfg.experiment.tag(),
        "config_sha256": config_hash(cfg)?,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "records": out.records.len(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write("manifest.json", &text)
}

/// [`run_experiment`] followed by [`write_outputs`] into `cfg.output_dir`.
pub fn run_to_dir(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutput> {
    let out = run_experiment(cfg, opts)?;
    write_outputs(cfg, &out, &cfg.output_dir)?;
    Ok(out)
}
