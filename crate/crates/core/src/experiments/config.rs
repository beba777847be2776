//! TOML experiment configuration and its validation.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::designs::{MAX_MOMENT_DIM, MAX_SYMMETRIZER_K};
use crate::error::{Error, Result};
use crate::linalg::DimensionSpec;
use crate::projected::MAX_BATH_QUBITS;
use crate::rmt::{bessel_extremum_times, bessel_zero_times};
use crate::weingarten::MAX_F1_DIM;

/// Largest joint dimension that is diagonalized densely.
pub const MAX_DENSE_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExperimentKind {
    #[serde(rename = "E1_bessel_roots")]
    BesselRoots,
    #[serde(rename = "E2_time_scan")]
    TimeScan,
    #[serde(rename = "E3_2k_to_k")]
    TwoKToK,
    #[serde(rename = "E4_structured")]
    Structured,
    #[serde(rename = "E5_weingarten_k1")]
    WeingartenK1,
    #[serde(rename = "E6_haar_closed_forms")]
    HaarClosedForms,
    #[serde(rename = "E7_gue_diagnostics")]
    GueDiagnostics,
}

impl ExperimentKind {
    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::BesselRoots => "E1_bessel_roots",
            ExperimentKind::TimeScan => "E2_time_scan",
            ExperimentKind::TwoKToK => "E3_2k_to_k",
            ExperimentKind::Structured => "E4_structured",
            ExperimentKind::WeingartenK1 => "E5_weingarten_k1",
            ExperimentKind::HaarClosedForms => "E6_haar_closed_forms",
            ExperimentKind::GueDiagnostics => "E7_gue_diagnostics",
        }
    }

    pub fn id(self) -> u64 {
        self as u64 + 1
    }

    fn uses_time(self) -> bool {
        !matches!(self, ExperimentKind::TwoKToK | ExperimentKind::HaarClosedForms)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A time value or a named time policy such as `"bessel_root(2)"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    Value(f64),
    Policy(String),
}

impl TimeSpec {
    pub fn resolve(&self) -> Result<f64> {
        match self {
            TimeSpec::Value(t) if t.is_finite() => Ok(*t),
            TimeSpec::Value(t) => Err(Error::Config(format!("non-finite time {t}"))),
            TimeSpec::Policy(p) => resolve_policy(p),
        }
    }
}

fn resolve_policy(p: &str) -> Result<f64> {
    let parse = |name: &str| -> Option<usize> {
        p.trim()
            .strip_prefix(name)?
            .strip_prefix('(')?
            .strip_suffix(')')?
            .trim()
            .parse()
            .ok()
    };
    if let Some(m) = parse("bessel_root") {
        if m >= 1 {
            return Ok(bessel_zero_times(m)[m - 1]);
        }
    }
    if let Some(m) = parse("bessel_extremum") {
        if m >= 1 {
            return Ok(bessel_extremum_times(m)[m - 1]);
        }
    }
    Err(Error::Config(format!(
        "unknown time policy {p:?} (expected bessel_root(m) or bessel_extremum(m) with m >= 1)"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeScan {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl TimeScan {
    /// `start, start + step, …` up to `stop` inclusive (with a 1e-9 slack).
    /// Points are `start + i·step` so no error accumulates.
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Config(format!(
                "t_scan needs finite bounds and step > 0, got {:?}",
                self
            )));
        }
        if self.stop < self.start {
            return Err(Error::Config("t_scan stop is below start".into()));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub n_a: Vec<u32>,
    #[serde(default)]
    pub n_b: Vec<u32>,
    /// Explicit `[n_a, n_b]` pairs; replaces the `n_a × n_b` product.
    #[serde(default)]
    pub dims: Vec<[u32; 2]>,
    pub k: Vec<usize>,
    #[serde(default)]
    pub t: Vec<TimeSpec>,
    #[serde(default)]
    pub t_scan: Option<TimeScan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// E1: target log-log slope and the half-width of the accepted window.
    pub slope_center: f64,
    pub slope_window: f64,
    /// E1: largest accepted mean `F^(1) − F_Haar` at the biggest bath.
    pub e1_final_gap: f64,
    /// E2: required ratio of the gap at `|J₁(2t)/t|` maxima to the gap at roots.
    pub e2_ratio: f64,
    /// E3: constant `c` in the bound `c·k/√N_A`.
    pub e3_constant: f64,
    /// E4: required separation factor against the negative control.
    pub e4_separation: f64,
    /// E5: expected shrink factor of the predicted gap per bath qubit, and
    /// its tolerance.
    pub e5_ratio_center: f64,
    pub e5_ratio_window: f64,
    /// E6: constant `c` in the Jensen-gap envelope `c·k²/(N_B^k N_A)`.
    pub e6_jensen_constant: f64,
    /// E7: concentration bound `c·t/√N` on the spread of `alpha_1`.
    pub e7_concentration: f64,
    /// E7: times at which the mean of `one_norm` must decrease.
    pub e7_decay_times: Vec<f64>,
    /// Width of statistical agreement, in standard errors.
    pub n_sigma: f64,
    pub max_failure_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            slope_center: -1.0,
            slope_window: 0.3,
            e1_final_gap: 0.02,
            e2_ratio: 5.0,
            e3_constant: 4.0,
            e4_separation: 3.0,
            e5_ratio_center: 2.0,
            e5_ratio_window: 0.6,
            e6_jensen_constant: 3.0,
            e7_concentration: 2.0,
            e7_decay_times: vec![1.0, 2.0, 4.0, 8.0],
            n_sigma: 3.0,
            max_failure_fraction: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumName {
    GueExp,
    ZeroTracePaired,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisName {
    #[default]
    Haar,
    Identity,
    Dft,
}

/// Structured global ensemble `V = U D U^†` used by E4 and E5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub spectrum: SpectrumName,
    /// Eigenphases in radians for `spectrum = "fixed"`, repeated cyclically
    /// to fill the dimension.
    #[serde(default)]
    pub phases: Vec<f64>,
    #[serde(default)]
    pub basis: BasisName,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_k0() -> f64 {
    crate::rmt::DEFAULT_K0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_k0")]
    pub k0: f64,
    /// Fill the `wall_ms` column. Off by default because timings make the
    /// CSV differ between otherwise identical runs.
    #[serde(default)]
    pub record_timing: bool,
    /// Also compute the exact trace distance of the `k`-th moment operator
    /// to Haar (always on for E3).
    #[serde(default)]
    pub materialize_l1: bool,
    pub grid: GridConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub ensemble: Option<EnsembleConfig>,
}

/// One resolved grid coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub n_a: u32,
    pub n_b: u32,
    pub k: usize,
    pub t: Option<f64>,
}

impl GridPoint {
    pub fn dims(&self) -> DimensionSpec {
        DimensionSpec {
            n_a: self.n_a,
            n_b: self.n_b,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().replace('\n', " ")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("cannot read config {}", path.display()), e))?;
        Self::from_toml_str(&text)
    }

    pub fn materialize_l1(&self) -> bool {
        self.materialize_l1 || self.experiment == ExperimentKind::TwoKToK
    }

    /// `(n_a, n_b)` pairs in grid order.
    pub fn dims(&self) -> Vec<(u32, u32)> {
        if !self.grid.dims.is_empty() {
            return self.grid.dims.iter().map(|d| (d[0], d[1])).collect();
        }
        let mut out = Vec::new();
        for &a in &self.grid.n_a {
            for &b in &self.grid.n_b {
                out.push((a, b));
            }
        }
        out
    }

    /// Resolved times, sorted ascending with duplicates removed. Empty for
    /// experiments that do not use time.
    pub fn times(&self) -> Result<Vec<f64>> {
        let mut ts = Vec::new();
        for t in &self.grid.t {
            ts.push(t.resolve()?);
        }
        if let Some(scan) = &self.grid.t_scan {
            ts.extend(scan.points()?);
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        Ok(ts)
    }

    /// Grid points ordered by dims, then `k`, then `t`.
    pub fn grid_points(&self) -> Result<Vec<GridPoint>> {
        let times = self.times()?;
        let times: Vec<Option<f64>> = if times.is_empty() {
            vec![None]
        } else {
            times.into_iter().map(Some).collect()
        };
        let mut out = Vec::new();
        for (n_a, n_b) in self.dims() {
            for &k in &self.grid.k {
                for &t in &times {
                    out.push(GridPoint { n_a, n_b, k, t });
                }
            }
        }
        Ok(out)
    }

    /// Checks every grid point against the module guards before any work.
    /// All problems are reported together on one line.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.trials < 1 {
            problems.push("trials must be at least 1".to_string());
        }
        if !self.k0.is_finite() || self.k0 < 0.0 {
            problems.push(format!("k0 must be finite and nonnegative, got {}", self.k0));
        }
        if !self.grid.dims.is_empty() && (!self.grid.n_a.is_empty() || !self.grid.n_b.is_empty())
        {
            problems.push("grid.dims cannot be combined with grid.n_a / grid.n_b".into());
        }
        if self.dims().is_empty() {
            problems.push("grid has no (n_a, n_b) points".into());
        }
        if self.grid.k.is_empty() {
            problems.push("grid.k is empty".into());
        }
        let times = match self.times() {
            Ok(t) => t,
            Err(e) => {
                problems.push(e.to_string());
                Vec::new()
            }
        };
        let kind = self.experiment;
        if kind.uses_time() && times.is_empty() && self.needs_time() {
            problems.push(format!("{kind} needs grid.t or grid.t_scan"));
        }
        if !kind.uses_time() && !times.is_empty() {
            problems.push(format!("{kind} does not use time; remove grid.t / grid.t_scan"));
        }
        match (kind, &self.ensemble) {
            (ExperimentKind::Structured, None) => {
                problems.push("E4_structured needs an [ensemble] section".into())
            }
            (ExperimentKind::Structured | ExperimentKind::WeingartenK1, Some(e)) => {
                if e.spectrum == SpectrumName::Fixed
                    && (e.phases.is_empty() || e.phases.iter().any(|p| !p.is_finite()))
                {
                    problems.push("fixed spectrum needs finite ensemble.phases".into());
                }
                if kind == ExperimentKind::WeingartenK1 && e.basis != BasisName::Haar {
                    problems.push("E5_weingarten_k1 averages over a Haar basis only".into());
                }
            }
            (_, Some(_)) => problems.push(format!("{kind} does not take an [ensemble] section")),
            _ => {}
        }
        for &(n_a, n_b) in &self.dims() {
            problems.extend(self.dims_problems(n_a, n_b));
        }
        for &k in &self.grid.k {
            if k < 1 {
                problems.push("k must be at least 1".into());
            }
            if kind == ExperimentKind::WeingartenK1 && k != 1 {
                problems.push(format!("E5_weingarten_k1 is exact only at k = 1, got k = {k}"));
            }
            if self.materialize_l1() && k > MAX_SYMMETRIZER_K {
                problems.push(format!("k = {k} exceeds the symmetrizer limit {MAX_SYMMETRIZER_K}"));
            }
        }
        if self.materialize_l1() {
            for &(n_a, _) in &self.dims() {
                for &k in &self.grid.k {
                    let d = (1u64 << n_a.min(40)).checked_pow(k as u32);
                    if d.is_none_or(|d| d > MAX_MOMENT_DIM as u64) {
                        problems.push(format!(
                            "N_A^k = 2^{n_a}^{k} exceeds the dense moment limit {MAX_MOMENT_DIM}"
                        ));
                    }
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            problems.dedup();
            Err(Error::Config(problems.join("; ")))
        }
    }

    fn needs_time(&self) -> bool {
        match self.experiment {
            ExperimentKind::Structured | ExperimentKind::WeingartenK1 => {
                self.spectrum_name() == SpectrumName::GueExp
            }
            _ => true,
        }
    }

    pub(crate) fn spectrum_name(&self) -> SpectrumName {
        self.ensemble
            .as_ref()
            .map(|e| e.spectrum)
            .unwrap_or(SpectrumName::ZeroTracePaired)
    }

    fn dims_problems(&self, n_a: u32, n_b: u32) -> Vec<String> {
        let mut p = Vec::new();
        let at = format!("(n_a={n_a}, n_b={n_b})");
        if let Err(e) = DimensionSpec::new(n_a, n_b) {
            p.push(format!("{at}: {e}"));
            return p;
        }
        let dim = 1usize << (n_a + n_b);
        match self.experiment {
            ExperimentKind::GueDiagnostics => {
                if dim > MAX_DENSE_DIM {
                    p.push(format!("{at}: N = {dim} exceeds the dense limit {MAX_DENSE_DIM}"));
                }
            }
            ExperimentKind::WeingartenK1 => {
                if dim > MAX_F1_DIM {
                    p.push(format!("{at}: N = {dim} exceeds the exact-prediction limit {MAX_F1_DIM}"));
                }
                if dim < 4 {
                    p.push(format!("{at}: N = {dim} is below the degree-4 Weingarten minimum"));
                }
            }
            _ => {
                if n_b > MAX_BATH_QUBITS {
                    p.push(format!("{at}: n_b exceeds the enumeration limit {MAX_BATH_QUBITS}"));
                }
                let dense = matches!(
                    self.experiment,
                    ExperimentKind::BesselRoots | ExperimentKind::TimeScan | ExperimentKind::Structured
                );
                if dense && dim > MAX_DENSE_DIM {
                    p.push(format!("{at}: N = {dim} exceeds the dense limit {MAX_DENSE_DIM}"));
                }
                if self.experiment == ExperimentKind::Structured
                    && self.spectrum_name() == SpectrumName::ZeroTracePaired
                    && !dim.is_multiple_of(2)
                {
                    p.push(format!("{at}: zero-trace pairing needs an even dimension"));
                }
            }
        }
        p
    }
}
