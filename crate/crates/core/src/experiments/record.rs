//! Result rows and their CSV serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::config::ExperimentKind;

pub const CSV_HEADER: &str = "experiment,trial,seed,n_a,n_b,k,t,f_k,f_haar,delta_sq,l1_exact,alpha1_re,alpha1_im,one_norm,wall_ms";

/// One Monte-Carlo observation at one grid point.
///
/// Metrics that an experiment does not produce are `None` and serialize as
/// empty CSV fields. `extras` carries experiment-specific values that feed
/// the summary but have no CSV column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub experiment: ExperimentKind,
    pub trial: usize,
    pub seed: u64,
    pub grid_index: usize,
    pub n_a: u32,
    pub n_b: u32,
    pub k: usize,
    pub t: Option<f64>,
    pub f_k: Option<f64>,
    pub f_haar: Option<f64>,
    pub delta_sq: Option<f64>,
    pub l1_exact: Option<f64>,
    pub alpha1_re: Option<f64>,
    pub alpha1_im: Option<f64>,
    pub one_norm: Option<f64>,
    pub wall_ms: Option<f64>,
    pub extras: BTreeMap<String, f64>,
    /// Set when the trial failed; all metrics are then empty.
    pub failure: Option<String>,
}

impl ResultRecord {
    pub fn gap(&self) -> Option<f64> {
        Some(self.f_k? - self.f_haar?)
    }

    /// Named metrics that are present, in a fixed order, extras last.
    pub fn metrics(&self) -> Vec<(String, f64)> {
        let named = [
            ("f_k", self.f_k),
            ("f_haar", self.f_haar),
            ("gap", self.gap()),
            ("delta_sq", self.delta_sq),
            ("l1_exact", self.l1_exact),
            ("alpha1_re", self.alpha1_re),
            ("alpha1_im", self.alpha1_im),
            ("one_norm", self.one_norm),
            ("wall_ms", self.wall_ms),
        ];
        let mut out: Vec<(String, f64)> = named
            .into_iter()
            .filter_map(|(n, v)| v.map(|v| (n.to_string(), v)))
            .collect();
        out.extend(self.extras.iter().map(|(k, v)| (k.clone(), *v)));
        out
    }

    pub fn all_finite(&self) -> bool {
        self.metrics().iter().all(|(_, v)| v.is_finite()) && self.t.is_none_or(f64::is_finite)
    }

    fn csv_line(&self, out: &mut String) {
        let opt = |v: Option<f64>| v.map(format_g17).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment.tag(),
            self.trial,
            self.seed,
            self.n_a,
            self.n_b,
            self.k,
            opt(self.t),
            opt(self.f_k),
            opt(self.f_haar),
            opt(self.delta_sq),
            opt(self.l1_exact),
            opt(self.alpha1_re),
            opt(self.alpha1_im),
            opt(self.one_norm),
            opt(self.wall_ms),
        );
    }
}

/// Header plus one LF-terminated line per record.
pub fn to_csv(records: &[ResultRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        r.csv_line(&mut out);
    }
    out
}

/// C's `%.17g`: 17 significant digits, fixed notation for decimal exponents
/// in `[-4, 17)`, trailing zeros removed.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        strip_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = strip_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
