//! Concave renormalization functions ψ, Marcinkiewicz norms, ψ-condition
//! diagnostics and the registry of named model sequences.
//!
//! ψ is only ever evaluated at nonnegative integers. It is stored through its
//! increments `x(k) = ψ(k+1) − ψ(k)` (with `ψ(0) = 0`), and the canonical
//! value `ψ(n)` is the compensated prefix sum of those increments. This is
//! what makes the witness identity `T(x) ≡ 1` hold bit-for-bit: numerator and
//! denominator are the same deterministic sum.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequences::{DecreasingSequence, SequenceModel, GENERATOR_HORIZON};
use crate::summation::CompensatedSum;

/// Beyond this argument ψ is evaluated from its closed form (when it has
/// one) instead of by streaming the prefix sum.
pub const PREFIX_EVALUATION_LIMIT: usize = 1 << 27;

type ClosedForm = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Drop points of the dpss increments: `q₀ = 8`, `q_{j+1} = 4·q_j·D_j`,
/// where the increment is divided by `D_j = 2^(6+j)` at `q_j`.
fn dpss_phases() -> Vec<(usize, i32)> {
    let mut phases = Vec::new();
    let mut q: usize = 8;
    let mut shift = 6;
    while q < GENERATOR_HORIZON {
        phases.push((q, shift));
        q = q.saturating_mul(4).saturating_mul(1 << shift);
        shift += 1;
    }
    phases
}

/// A concave, strictly increasing ψ on the integers with `ψ(0) = 0`.
#[derive(Clone)]
pub struct PsiFunction {
    name: String,
    increments: DecreasingSequence,
    // shifted(n) = ψ(n+1)
    shifted: SequenceModel,
    closed_form: Option<ClosedForm>,
}

impl fmt::Debug for PsiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PsiFunction")
            .field("name", &self.name)
            .field("horizon", &self.horizon())
            .finish()
    }
}

impl PsiFunction {
    fn build(name: String, increments: DecreasingSequence, closed_form: Option<ClosedForm>) -> Self {
        let shifted = increments.cumulative();
        PsiFunction {
            name,
            increments,
            shifted,
            closed_form,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn increments(&self) -> &DecreasingSequence {
        &self.increments
    }

    /// Largest `n` for which `ψ(n)` is defined.
    pub fn horizon(&self) -> usize {
        self.increments.horizon()
    }

    /// The sequence `n ↦ ψ(n+1)`.
    pub fn shifted_values(&self) -> &SequenceModel {
        &self.shifted
    }

    pub fn value(&self, n: usize) -> Result<f64> {
        if n > self.horizon() {
            return Err(Error::Horizon {
                requested: n,
                horizon: self.horizon(),
            });
        }
        if n == 0 {
            return Ok(0.0);
        }
        match &self.closed_form {
            Some(f) if n > PREFIX_EVALUATION_LIMIT => Ok(f(n)),
            _ => self.shifted.get(n - 1),
        }
    }

    /// `ψ` at many points with a single forward sweep of the prefix sum.
    pub fn values_at(&self, points: &[usize]) -> Result<Vec<f64>> {
        if let Some(&bad) = points.iter().find(|&&p| p > self.horizon()) {
            return Err(Error::Horizon {
                requested: bad,
                horizon: self.horizon(),
            });
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by_key(|&i| points[i]);
        let mut out = vec![0.0; points.len()];
        let streamed_limit = if self.closed_form.is_some() {
            PREFIX_EVALUATION_LIMIT
        } else {
            usize::MAX
        };
        let mut stream = self.increments.iter();
        let mut acc = CompensatedSum::new();
        let mut reached = 0;
        for i in order {
            let p = points[i];
            if p > streamed_limit {
                out[i] = self.closed_form.as_ref().expect("closed form present")(p);
                continue;
            }
            while reached < p {
                acc.add(stream.next().expect("within horizon"));
                reached += 1;
            }
            out[i] = acc.value();
        }
        Ok(out)
    }

    /// `ψ(2t)/ψ(t)` for `t ≥ 1`.
    pub fn doubling_ratio(&self, t: usize) -> Result<f64> {
        if t == 0 {
            return Err(Error::arg("doubling ratio needs t >= 1"));
        }
        let v = self.values_at(&[t, 2 * t])?;
        Ok(v[1] / v[0])
    }
}

/// Textual ψ specification: `log`, `power:α`, `linear`, `dpss`, `file:<csv>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "String")]
pub enum PsiSpec {
    Log,
    Power(f64),
    Linear,
    Dpss,
    File(PathBuf),
}

impl fmt::Display for PsiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiSpec::Log => write!(f, "log"),
            PsiSpec::Power(a) => write!(f, "power:{a}"),
            PsiSpec::Linear => write!(f, "linear"),
            PsiSpec::Dpss => write!(f, "dpss"),
            PsiSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl From<PsiSpec> for String {
    fn from(spec: PsiSpec) -> String {
        spec.to_string()
    }
}

impl FromStr for PsiSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("log", None) => Ok(PsiSpec::Log),
            ("linear", None) => Ok(PsiSpec::Linear),
            ("dpss", None) => Ok(PsiSpec::Dpss),
            ("power", Some(a)) => {
                let alpha: f64 = a
                    .parse()
                    .map_err(|_| Error::arg(format!("invalid power exponent '{a}'")))?;
                Ok(PsiSpec::Power(alpha))
            }
            ("file", Some(p)) if !p.is_empty() => Ok(PsiSpec::File(PathBuf::from(p))),
            _ => Err(Error::arg(format!(
                "unknown psi '{s}' (expected log, power:<alpha>, linear, dpss or file:<csv>)"
            ))),
        }
    }
}

/// ψ whose increments are the given sequence.
pub fn psi_from_increments(x: DecreasingSequence) -> Result<PsiFunction> {
    let h = x.horizon();
    if h == 0 {
        return Err(Error::arg("psi increments must be nonempty"));
    }
    // nonincreasing, so positivity of the last entry covers all of them
    let last = x.get(h - 1)?;
    if last <= 0.0 {
        return Err(Error::arg(format!(
            "psi increments must be strictly positive (entry {} is {last})",
            h - 1
        )));
    }
    Ok(PsiFunction::build(format!("increments({})", x.label()), x, None))
}

pub fn psi_named(spec: &PsiSpec) -> Result<PsiFunction> {
    let h = GENERATOR_HORIZON;
    let psi = match spec {
        PsiSpec::Log => PsiFunction::build(
            "log".into(),
            DecreasingSequence::new_unchecked(SequenceModel::from_fn("psi-inc(log)", h, |k| {
                (1.0 / (k as f64 + 1.0)).ln_1p()
            })),
            Some(Arc::new(|n| (n as f64).ln_1p())),
        ),
        PsiSpec::Power(alpha) => {
            let alpha = *alpha;
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::arg(format!("power exponent must lie in (0, 1), got {alpha}")));
            }
            PsiFunction::build(
                format!("power:{alpha}"),
                DecreasingSequence::new_unchecked(SequenceModel::from_fn(
                    format!("psi-inc(power:{alpha})"),
                    h,
                    move |k| {
                        if k == 0 {
                            1.0
                        } else {
                            // (k+1)^α − k^α without cancellation
                            let k = k as f64;
                            k.powf(alpha) * (alpha * (1.0 / k).ln_1p()).exp_m1()
                        }
                    },
                )),
                Some(Arc::new(move |n| (n as f64).powf(alpha))),
            )
        }
        PsiSpec::Linear => PsiFunction::build(
            "linear".into(),
            DecreasingSequence::new_unchecked(SequenceModel::from_fn("psi-inc(linear)", h, |_| 1.0)),
            Some(Arc::new(|n| n as f64)),
        ),
        PsiSpec::Dpss => {
            let phases = Arc::new(dpss_phases());
            let inc_phases = Arc::clone(&phases);
            let increment = move |k: usize| {
                let mut e = 0;
                for &(q, shift) in inc_phases.iter() {
                    if k < q {
                        break;
                    }
                    e += shift;
                }
                (-(e as f64)).exp2()
            };
            let closed = move |n: usize| {
                let (mut total, mut prev, mut e) = (0.0, 0usize, 0);
                for &(q, shift) in phases.iter() {
                    if n <= q {
                        break;
                    }
                    total += (q - prev) as f64 * (-(e as f64)).exp2();
                    prev = q;
                    e += shift;
                }
                total + (n - prev) as f64 * (-(e as f64)).exp2()
            };
            PsiFunction::build(
                "dpss".into(),
                DecreasingSequence::new_unchecked(SequenceModel::from_fn("psi-inc(dpss)", h, increment)),
                Some(Arc::new(closed)),
            )
        }
        PsiSpec::File(path) => {
            let values = crate::io::read_sequence_csv(path)?;
            let x = DecreasingSequence::from_vec(values).map_err(|e| match e {
                Error::Precondition { index, reason } => {
                    Error::arg(format!("psi increments in {}: index {index}: {reason}", path.display()))
                }
                other => other,
            })?;
            let mut psi = psi_from_increments(x)?;
            psi.name = spec.to_string();
            psi
        }
    };
    Ok(psi)
}

#[derive(Debug, Clone, Serialize)]
pub struct MarcinkiewiczNormResult {
    pub value: f64,
    pub argmax: usize,
    pub horizon: usize,
    /// The running maximum did not move over the final decade of indices.
    pub attained_within_horizon: bool,
}

/// `max_{n < horizon} T(a)(n)`.
pub fn marcinkiewicz_norm(a: &DecreasingSequence, psi: &PsiFunction, horizon: usize) -> Result<MarcinkiewiczNormResult> {
    if horizon == 0 {
        return Err(Error::arg("norm horizon must be positive"));
    }
    let t = crate::dixmier::prefunctional(a, psi)?;
    if t.horizon() < horizon {
        return Err(Error::Horizon {
            requested: horizon,
            horizon: t.horizon(),
        });
    }
    let (mut value, mut argmax) = (f64::NEG_INFINITY, 0);
    for (n, v) in t.iter().take(horizon).enumerate() {
        if v > value {
            value = v;
            argmax = n;
        }
    }
    Ok(MarcinkiewiczNormResult {
        value,
        argmax,
        horizon,
        attained_within_horizon: argmax < horizon.div_ceil(10),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TailWindow {
    pub from: usize,
    pub to: usize,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiDiagnostics {
    pub psi: String,
    pub horizon: usize,
    pub grid_ratio: f64,
    /// `(t, ψ(2t)/ψ(t))` on the geometric grid.
    pub samples: Vec<(usize, f64)>,
    pub sample_min: f64,
    pub sample_max: f64,
    /// Windows over the upper half and upper quarter of the grid (log scale).
    pub tail_windows: Vec<TailWindow>,
    /// Horizon-limited estimates taken over the first tail window.
    pub liminf_estimate: f64,
    pub limsup_estimate: f64,
}

fn geometric_grid(max: usize, ratio: f64) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut i = 0;
    loop {
        let t = ratio.powi(i).round() as usize;
        if t > max {
            break;
        }
        if grid.last() != Some(&t) {
            grid.push(t);
        }
        i += 1;
    }
    grid
}

pub fn psi_diagnostics(psi: &PsiFunction, horizon: usize, grid_ratio: f64) -> Result<PsiDiagnostics> {
    if horizon < 4 {
        return Err(Error::arg("diagnostics need a horizon of at least 4"));
    }
    if !(grid_ratio > 1.0 && grid_ratio.is_finite()) {
        return Err(Error::arg(format!("grid ratio must exceed 1, got {grid_ratio}")));
    }
    let grid = geometric_grid(horizon / 2, grid_ratio);
    let points: Vec<usize> = grid.iter().flat_map(|&t| [t, 2 * t]).collect();
    let values = psi.values_at(&points)?;
    let mut samples = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        let r = values[2 * i + 1] / values[2 * i];
        if !(1.0 - 1e-12..=2.0 + 1e-12).contains(&r) {
            return Err(Error::Construction(format!(
                "psi({}) / psi({t}) = {r} lies outside [1, 2]; psi is not concave increasing",
                2 * t
            )));
        }
        samples.push((t, r));
    }
    let sample_min = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let sample_max = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let top = (horizon / 2) as f64;
    let tail_windows: Vec<TailWindow> = [0.5, 0.25]
        .iter()
        .map(|frac| {
            let from = top.powf(1.0 - frac).ceil() as usize;
            let in_window = samples.iter().filter(|s| s.0 >= from).map(|s| s.1);
            let (min, max) = in_window.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r), hi.max(r))
            });
            TailWindow {
                from,
                to: horizon / 2,
                min,
                max,
            }
        })
        .collect();
    Ok(PsiDiagnostics {
        psi: psi.name().to_string(),
        horizon,
        grid_ratio,
        liminf_estimate: tail_windows[0].min,
        limsup_estimate: tail_windows[0].max,
        samples,
        sample_min,
        sample_max,
        tail_windows,
    })
}

/// `(1/n) · ‖σ_n a‖` over indices `m < horizon` of `σ_n a`.
///
/// Within a block `nj ≤ m < n(j+1)` the prefix sum of `σ_n a` is affine in
/// `m` while `ψ(m+1)` is concave, so `T(σ_n a)` is quasi-convex there and its
/// maximum sits at a block endpoint. Only the endpoints are evaluated, which
/// makes horizons of `n · 2^20` affordable for `n` up to `2^20`.
pub fn direct_sum_norm_rate(a: &DecreasingSequence, psi: &PsiFunction, n: usize, horizon: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::arg("direct sum multiplicity must be at least 1"));
    }
    if horizon == 0 {
        return Err(Error::arg("norm horizon must be positive"));
    }
    let blocks = horizon.div_ceil(n);
    if a.horizon() < blocks {
        return Err(Error::Horizon {
            requested: blocks,
            horizon: a.horizon(),
        });
    }
    let mut points = Vec::with_capacity(2 * blocks);
    for j in 0..blocks {
        let first = n * j;
        let last = (first + n - 1).min(horizon - 1);
        points.push(first + 1);
        if last != first {
            points.push(last + 1);
        }
    }
    let psi_values = psi.values_at(&points)?;
    let nf = n as f64;
    let mut best = f64::NEG_INFINITY;
    let mut acc = CompensatedSum::new();
    let mut idx = 0;
    for (j, v) in a.iter().take(blocks).enumerate() {
        let before = acc.value();
        acc.add(v);
        let first = n * j;
        let last = (first + n - 1).min(horizon - 1);
        if last == first {
            // single-entry block: prefix is n·A(j−1) + a(j), which for n = 1
            // is the plain compensated prefix
            let prefix = if n == 1 { acc.value() } else { nf * before + v };
            best = best.max(prefix / psi_values[idx]);
            idx += 1;
        } else {
            best = best.max((nf * before + v) / psi_values[idx]);
            let width = (last - first + 1) as f64;
            best = best.max((nf * before + width * v) / psi_values[idx + 1]);
            idx += 2;
        }
    }
    Ok(best / nf)
}

/// Named decreasing model sequences.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "String")]
pub enum ModelSpec {
    Harmonic,
    PowerDecay(f64),
    Geometric(f64),
    PsiIncrements(PsiSpec),
    Oscillating,
    Constant(f64),
    File(PathBuf),
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Harmonic => write!(f, "harmonic"),
            ModelSpec::PowerDecay(b) => write!(f, "power:{b}"),
            ModelSpec::Geometric(r) => write!(f, "geometric:{r}"),
            ModelSpec::PsiIncrements(p) => write!(f, "psi-inc:{p}"),
            ModelSpec::Oscillating => write!(f, "oscillating"),
            ModelSpec::Constant(c) => write!(f, "constant:{c}"),
            ModelSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl From<ModelSpec> for String {
    fn from(spec: ModelSpec) -> String {
        spec.to_string()
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let number = |a: &str| {
            a.parse::<f64>()
                .map_err(|_| Error::arg(format!("invalid number '{a}' in sequence spec '{s}'")))
        };
        match s.split_once(':') {
            None if s == "harmonic" => Ok(ModelSpec::Harmonic),
            None if s == "oscillating" => Ok(ModelSpec::Oscillating),
            Some(("power", a)) => Ok(ModelSpec::PowerDecay(number(a)?)),
            Some(("geometric", a)) => Ok(ModelSpec::Geometric(number(a)?)),
            Some(("constant", a)) => Ok(ModelSpec::Constant(number(a)?)),
            Some(("psi-inc", a)) => Ok(ModelSpec::PsiIncrements(a.parse()?)),
            Some(("file", p)) if !p.is_empty() => Ok(ModelSpec::File(PathBuf::from(p))),
            _ => Err(Error::arg(format!(
                "unknown sequence '{s}' (expected harmonic, power:<beta>, geometric:<r>, \
                 psi-inc:<psi>, oscillating, constant:<c> or file:<csv>)"
            ))),
        }
    }
}

/// Increment of `t ↦ log(1+t)·(1.5 + 0.5·sin(log log(e+t)))` at `t = k`.
///
/// The prefunctional of this sequence against ψ = log tracks
/// `1.5 + 0.5·sin(log log n)`, which keeps oscillating on exponential scales.
/// The closed-form derivative is already positive and nonincreasing on every
/// horizon we sweep, so no clamping is applied.
pub fn oscillating_increment(k: usize) -> f64 {
    let t = k as f64;
    let e_t = std::f64::consts::E + t;
    let log_e_t = e_t.ln();
    let ll = log_e_t.ln();
    let g = 1.5 + 0.5 * ll.sin();
    g / (1.0 + t) + t.ln_1p() * 0.5 * ll.cos() / (log_e_t * e_t)
}

pub fn model_sequence(spec: &ModelSpec) -> Result<DecreasingSequence> {
    let h = GENERATOR_HORIZON;
    Ok(match spec {
        ModelSpec::Harmonic => DecreasingSequence::new_unchecked(SequenceModel::harmonic(h)),
        ModelSpec::PowerDecay(beta) => DecreasingSequence::new_unchecked(SequenceModel::power_decay(*beta, h)?),
        ModelSpec::Geometric(r) => DecreasingSequence::new_unchecked(SequenceModel::geometric(*r, h)?),
        ModelSpec::PsiIncrements(p) => psi_named(p)?.increments().clone(),
        ModelSpec::Oscillating => {
            DecreasingSequence::new_unchecked(SequenceModel::from_fn("oscillating", h, oscillating_increment))
        }
        ModelSpec::Constant(c) => DecreasingSequence::new_unchecked(SequenceModel::constant(*c, h)?),
        ModelSpec::File(path) => {
            let values = crate::io::read_sequence_csv(path)?;
            DecreasingSequence::from_vec(values).map_err(|e| match e {
                Error::Precondition { index, reason } => Error::Construction(format!(
                    "{} is not nonincreasing at index {index}: {reason}",
                    path.display()
                )),
                other => other,
            })?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::prefix_sums;

    fn log() -> PsiFunction {
        psi_named(&PsiSpec::Log).unwrap()
    }

    #[test]
    fn spec_parsing_round_trips() {
        for s in ["log", "power:0.5", "linear", "dpss", "file:x.csv"] {
            assert_eq!(s.parse::<PsiSpec>().unwrap().to_string(), s);
        }
        assert!("power".parse::<PsiSpec>().is_err());
        assert!("cubic".parse::<PsiSpec>().is_err());
        for s in ["harmonic", "power:0.7", "geometric:0.5", "psi-inc:log", "oscillating", "constant:1"] {
            assert_eq!(s.parse::<ModelSpec>().unwrap().to_string(), s);
        }
        assert!("power:x".parse::<ModelSpec>().is_err());
    }

    #[test]
    fn named_values() {
        let psi = log();
        assert_eq!(psi.value(0).unwrap(), 0.0);
        assert!((psi.value(1).unwrap() - std::f64::consts::LN_2).abs() < 1e-16);
        let lin = psi_named(&PsiSpec::Linear).unwrap();
        for n in [1usize, 7, 1000] {
            assert_eq!(lin.value(n).unwrap(), n as f64);
            let r = lin.value(2 * n + 1).unwrap() / lin.value(n + 1).unwrap();
            assert_eq!(r, (2 * n + 1) as f64 / (n + 1) as f64);
        }
        let sqrt = psi_named(&PsiSpec::Power(0.5)).unwrap();
        assert!((sqrt.doubling_ratio(1_000_000).unwrap() - 2f64.sqrt()).abs() < 1e-3);
        assert!(psi_named(&PsiSpec::Power(1.0)).is_err());
        assert!(psi_named(&PsiSpec::Power(0.0)).is_err());
    }

    #[test]
    fn log_prefix_matches_closed_form() {
        let psi = log();
        let pts = [1usize, 10, 1000, 1 << 20];
        let vals = psi.values_at(&pts).unwrap();
        for (p, v) in pts.iter().zip(vals) {
            let exact = (*p as f64).ln_1p();
            assert!((v - exact).abs() <= 4e-16 * exact.max(1.0), "{p}: {v} vs {exact}");
        }
        let r = psi.doubling_ratio(1_000_000).unwrap();
        assert!((r - 2_000_001f64.ln() / 1_000_001f64.ln()).abs() < 1e-12);
        assert!((r - 1.0502).abs() < 1e-4);
    }

    #[test]
    fn power_increments_match_closed_form() {
        let psi = psi_named(&PsiSpec::Power(0.5)).unwrap();
        for n in [1usize, 4, 100, 123_456] {
            let v = psi.value(n).unwrap();
            assert!((v - (n as f64).sqrt()).abs() < 1e-12 * v.max(1.0));
        }
    }

    #[test]
    fn dpss_prefix_is_exact_and_matches_closed_form() {
        let psi = psi_named(&PsiSpec::Dpss).unwrap();
        let pts: Vec<usize> = vec![1, 7, 8, 9, 2047, 2048, 2049, 100_000, 1 << 20, (1 << 20) + 5, 5_000_000];
        let streamed = psi.values_at(&pts).unwrap();
        let closed = psi.closed_form.as_ref().unwrap();
        for (p, v) in pts.iter().zip(&streamed) {
            assert_eq!(*v, closed(*p), "dpss at {p}");
        }
        assert_eq!(psi.value(8).unwrap(), 8.0);
        assert_eq!(psi.value(9).unwrap(), 8.0 + 1.0 / 64.0);
    }

    #[test]
    fn values_at_any_order() {
        let psi = log();
        let v = psi.values_at(&[100, 3, 100, 0]).unwrap();
        assert_eq!(v[0], v[2]);
        assert_eq!(v[3], 0.0);
        assert_eq!(v[1], psi.value(3).unwrap());
    }

    #[test]
    fn from_increments() {
        let ones = DecreasingSequence::from_vec(vec![1.0; 10]).unwrap();
        let psi = psi_from_increments(ones).unwrap();
        for n in 0..=10 {
            assert_eq!(psi.value(n).unwrap(), n as f64);
        }
        assert!(psi.value(11).is_err());
        let zero_tail = DecreasingSequence::from_vec(vec![1.0, 0.0]).unwrap();
        assert!(matches!(psi_from_increments(zero_tail), Err(Error::Argument(_))));

        let h = model_sequence(&ModelSpec::Harmonic).unwrap().truncate(1000).unwrap();
        let psi = psi_from_increments(h.clone()).unwrap();
        let oracle: f64 = (1..=1000).map(|k| 1.0 / k as f64).sum();
        assert!((psi.value(1000).unwrap() - oracle).abs() < 1e-13);

        // increments of log round-trip exactly
        let inc = log().increments().truncate(5000).unwrap();
        let back = psi_from_increments(inc).unwrap();
        for n in [1usize, 17, 4096, 5000] {
            assert_eq!(back.value(n).unwrap(), log().value(n).unwrap());
        }
    }

    #[test]
    fn norm_examples() {
        let psi = log();
        let w = psi.increments().truncate(10_000).unwrap();
        let r = marcinkiewicz_norm(&w, &psi, 10_000).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.attained_within_horizon);

        let delta = DecreasingSequence::from_vec(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let r = marcinkiewicz_norm(&delta, &psi, 4).unwrap();
        assert_eq!(r.argmax, 0);
        assert!((r.value - 1.0 / std::f64::consts::LN_2).abs() < 1e-15);

        let h = model_sequence(&ModelSpec::Harmonic).unwrap();
        let r = marcinkiewicz_norm(&h, &psi, 100_000).unwrap();
        assert_eq!(r.argmax, 0);
        assert!((r.value - 1.4427).abs() < 1e-4);
    }

    #[test]
    fn diagnostics_examples() {
        let lin = psi_diagnostics(&psi_named(&PsiSpec::Linear).unwrap(), 1 << 16, 2.0).unwrap();
        assert!(lin.samples.iter().all(|s| s.1 == 2.0));
        let d = psi_diagnostics(&log(), 2_000_000, 2f64.powf(0.25)).unwrap();
        assert!(d.samples.iter().all(|s| (1.0..=2.0).contains(&s.1)));
        assert!(d.liminf_estimate < 1.06);
        let dp = psi_diagnostics(&psi_named(&PsiSpec::Dpss).unwrap(), 10_000_000, 2f64.powf(0.25)).unwrap();
        assert!(dp.sample_min <= 1.05, "{}", dp.sample_min);
        assert!(dp.sample_max >= 1.5, "{}", dp.sample_max);
        assert!(psi_diagnostics(&log(), 3, 2.0).is_err());
    }

    #[test]
    fn direct_sum_rate_n1_is_norm() {
        let psi = log();
        let h = model_sequence(&ModelSpec::Harmonic).unwrap();
        let rate = direct_sum_norm_rate(&h, &psi, 1, 50_000).unwrap();
        assert_eq!(rate, marcinkiewicz_norm(&h, &psi, 50_000).unwrap().value);
    }

    #[test]
    fn direct_sum_rate_matches_brute_force() {
        let psi = log();
        let g = model_sequence(&ModelSpec::Geometric(0.5)).unwrap();
        let h = model_sequence(&ModelSpec::Harmonic).unwrap();
        for a in [&g, &h] {
            for n in [2usize, 3, 7, 32] {
                let horizon = 1000 * n + 3;
                let fast = direct_sum_norm_rate(a, &psi, n, horizon).unwrap();
                let brute = marcinkiewicz_norm(&a.dilate_up(n).unwrap(), &psi, horizon).unwrap().value / n as f64;
                assert!((fast - brute).abs() < 1e-12 * brute, "n={n}: {fast} vs {brute}");
            }
        }
    }

    #[test]
    fn oscillating_is_decreasing_on_sample() {
        let a = model_sequence(&ModelSpec::Oscillating).unwrap();
        assert_eq!(a.get(0).unwrap(), 1.5);
        let v = a.to_vec(1_000_000).unwrap();
        assert!(v.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
    }

    #[test]
    fn psi_increments_prefix_reproduces_psi() {
        let inc = model_sequence(&ModelSpec::PsiIncrements(PsiSpec::Log)).unwrap();
        let p = prefix_sums(&inc, 1000).unwrap();
        let psi = log();
        for n in [0usize, 10, 999] {
            assert_eq!(p.get(n).unwrap(), psi.value(n + 1).unwrap());
        }
    }
}
