//! Finite-horizon surrogates for dilation-invariant singular states.
//!
//! No finite averaging functional is simultaneously singular and dilation
//! invariant, so every procedure here is a labelled stand-in: a linear,
//! positive, normalized average that is dominated by the tail of the
//! horizon. Each evaluation carries residuals measuring how far the
//! procedure is from shift invariance, dilation invariance and horizon
//! independence.
//!
//! All averages accumulate with [`MonotoneSum`], whose rounding is monotone
//! in every summand; positivity, monotonicity and normalization on the
//! constant 1 therefore hold exactly in floating point.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequences::{dilate_up, SequenceModel};
use crate::summation::MonotoneSum;

/// Dilation factors probed for residuals when the procedure has none.
pub const DEFAULT_RESIDUAL_FACTORS: [usize; 3] = [2, 4, 8];

const ALLOWED_FACTORS: [usize; 4] = [2, 3, 4, 8];

/// Relative gap between the last two extension values below which the
/// extension is reported finite.
pub const STABILIZATION_TOLERANCE: f64 = 1e-6;

/// Below this value a sequence is treated as negligible by
/// [`product_nullity_check`].
pub const NULLITY_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "String")]
pub enum LimitKind {
    /// `order`-fold iterated running average, read at the horizon.
    Cesaro { order: u32 },
    /// `(1/H_N) Σ_{n<N} x(n)/(n+1)`.
    LogMean,
    /// Mean of the Cesàro values of `x` and of `σ_d x` for `d` in `factors`.
    DilationAveraged { factors: Vec<usize>, order: u32 },
    /// Plain mean over the final `fraction` of the horizon.
    TailWindow { fraction: f64 },
}

impl LimitKind {
    pub fn dilation_averaged(factors: &[usize], order: u32) -> Result<Self> {
        let mut f = factors.to_vec();
        f.sort_unstable();
        f.dedup();
        if f.is_empty() {
            return Err(Error::arg("dilation factor set must be nonempty"));
        }
        if let Some(bad) = f.iter().find(|d| !ALLOWED_FACTORS.contains(d)) {
            return Err(Error::arg(format!("dilation factor {bad} not in {{2, 3, 4, 8}}")));
        }
        if order == 0 {
            return Err(Error::arg("cesaro order must be at least 1"));
        }
        Ok(LimitKind::DilationAveraged { factors: f, order })
    }

    fn validate(&self) -> Result<()> {
        match self {
            LimitKind::Cesaro { order } if *order == 0 => Err(Error::arg("cesaro order must be at least 1")),
            LimitKind::DilationAveraged { factors, order } => {
                Self::dilation_averaged(factors, *order).map(|_| ())
            }
            LimitKind::TailWindow { fraction } if !(*fraction > 0.0 && *fraction <= 1.0) => {
                Err(Error::arg(format!("tail fraction must lie in (0, 1], got {fraction}")))
            }
            _ => Ok(()),
        }
    }
}

impl Default for LimitKind {
    fn default() -> Self {
        LimitKind::DilationAveraged {
            factors: vec![2, 4, 8],
            order: 1,
        }
    }
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitKind::Cesaro { order } => write!(f, "cesaro:{order}"),
            LimitKind::LogMean => write!(f, "logmean"),
            LimitKind::DilationAveraged { factors, order } => {
                let list: Vec<String> = factors.iter().map(usize::to_string).collect();
                write!(f, "dilavg:{}", list.join(","))?;
                if *order != 1 {
                    write!(f, "@{order}")?;
                }
                Ok(())
            }
            LimitKind::TailWindow { fraction } => write!(f, "tail:{fraction}"),
        }
    }
}

impl From<LimitKind> for String {
    fn from(kind: LimitKind) -> String {
        kind.to_string()
    }
}

/// `cesaro[:k]`, `logmean`, `dilavg[:d1,d2,…][@k]`, `tail:f`.
impl FromStr for LimitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || {
            Error::arg(format!(
                "unknown limit procedure '{s}' (expected cesaro:<k>, logmean, dilavg:<d,..>[@k] or tail:<fraction>)"
            ))
        };
        let order = |t: &str| t.parse::<u32>().map_err(|_| bad());
        let kind = match s.split_once(':') {
            None => match s {
                "cesaro" => LimitKind::Cesaro { order: 1 },
                "logmean" => LimitKind::LogMean,
                "dilavg" => LimitKind::default(),
                _ => match s.strip_prefix("dilavg@") {
                    Some(k) => LimitKind::dilation_averaged(&[2, 4, 8], order(k)?)?,
                    None => return Err(bad()),
                },
            },
            Some(("cesaro", k)) => LimitKind::Cesaro { order: order(k)? },
            Some(("tail", f)) => LimitKind::TailWindow {
                fraction: f.parse().map_err(|_| bad())?,
            },
            Some(("dilavg", rest)) => {
                let (list, k) = match rest.split_once('@') {
                    Some((l, k)) => (l, order(k)?),
                    None => (rest, 1),
                };
                let factors = list
                    .split(',')
                    .map(|d| d.trim().parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                LimitKind::dilation_averaged(&factors, k)?
            }
            _ => return Err(bad()),
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitProcedure {
    pub kind: LimitKind,
    pub horizon: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitEvaluation {
    pub procedure: String,
    pub horizon: usize,
    pub value: f64,
    /// `|value(x) − value(x(· + 1))|`.
    pub shift_residual: f64,
    /// `(d, |value(x) − value(σ_d x)|)`.
    pub dilation_residuals: Vec<(usize, f64)>,
    /// `|value at N − value at N/2|`.
    pub tail_sensitivity: f64,
}

fn cesaro_of(values: impl Iterator<Item = f64>, order: u32) -> f64 {
    let mut sums = vec![MonotoneSum::new(); order as usize];
    let mut last = 0.0;
    for (n, v) in values.enumerate() {
        let d = (n + 1) as f64;
        let mut cur = v;
        for s in sums.iter_mut() {
            s.add(cur);
            cur = s.value() / d;
        }
        last = cur;
    }
    last
}

impl LimitProcedure {
    pub fn new(kind: LimitKind, horizon: usize) -> Result<Self> {
        kind.validate()?;
        Ok(LimitProcedure { kind, horizon })
    }

    pub fn label(&self) -> String {
        self.kind.to_string()
    }

    pub fn with_horizon(&self, horizon: usize) -> Self {
        LimitProcedure {
            kind: self.kind.clone(),
            horizon,
        }
    }

    /// The surrogate value on `x(0..horizon)`.
    pub fn value(&self, x: &SequenceModel) -> Result<f64> {
        let n = self.horizon;
        if n == 0 {
            return Err(Error::arg("limit procedure horizon must be positive"));
        }
        if x.horizon() < n {
            return Err(Error::Horizon {
                requested: n,
                horizon: x.horizon(),
            });
        }
        let v = match &self.kind {
            LimitKind::Cesaro { order } => cesaro_of(x.iter().take(n), *order),
            LimitKind::LogMean => {
                let mut num = MonotoneSum::new();
                let mut den = MonotoneSum::new();
                for (k, v) in x.iter().take(n).enumerate() {
                    let w = (k + 1) as f64;
                    num.add(v / w);
                    den.add(1.0 / w);
                }
                num.value() / den.value()
            }
            LimitKind::DilationAveraged { factors, order } => {
                let mut acc = MonotoneSum::new();
                acc.add(cesaro_of(x.iter().take(n), *order));
                for &d in factors {
                    acc.add(cesaro_of(dilate_up(x, d)?.iter().take(n), *order));
                }
                acc.value() / (factors.len() + 1) as f64
            }
            LimitKind::TailWindow { fraction } => {
                let w = ((fraction * n as f64).ceil() as usize).clamp(1, n);
                let mut acc = MonotoneSum::new();
                for v in x.stream(n - w)?.take(w) {
                    acc.add(v);
                }
                acc.value() / w as f64
            }
        };
        if !v.is_finite() {
            return Err(Error::arg(format!(
                "limit procedure {} produced {v}; the input is not bounded on its horizon",
                self.label()
            )));
        }
        Ok(v)
    }

    /// Value plus shift, dilation and horizon residuals.
    pub fn evaluate(&self, x: &SequenceModel) -> Result<LimitEvaluation> {
        let value = self.value(x)?;
        let n = self.horizon;
        let shifted = x.shift(1);
        let shift_value = self.with_horizon(n.min(shifted.horizon()).max(1)).value(&shifted);
        let shift_residual = match shift_value {
            Ok(v) => (value - v).abs(),
            Err(_) => 0.0,
        };
        let factors: Vec<usize> = match &self.kind {
            LimitKind::DilationAveraged { factors, .. } => factors.clone(),
            _ => DEFAULT_RESIDUAL_FACTORS.to_vec(),
        };
        let dilation_residuals = factors
            .iter()
            .map(|&d| Ok((d, (value - self.value(&dilate_up(x, d)?)?).abs())))
            .collect::<Result<Vec<_>>>()?;
        let half = self.with_horizon((n / 2).max(1)).value(x)?;
        Ok(LimitEvaluation {
            procedure: self.label(),
            horizon: n,
            value,
            shift_residual,
            dilation_residuals,
            tail_sensitivity: (value - half).abs(),
        })
    }
}

pub fn glim_evaluate(proc: &LimitProcedure, x: &SequenceModel) -> Result<LimitEvaluation> {
    proc.evaluate(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ExtensionVerdict {
    Finite { value: f64 },
    Divergent,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionCurve {
    pub procedure: String,
    pub horizon: usize,
    pub cutoffs: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(flatten)]
    pub verdict: ExtensionVerdict,
}

impl ExtensionCurve {
    pub fn is_finite(&self) -> bool {
        matches!(self.verdict, ExtensionVerdict::Finite { .. })
    }
}

/// `v(m) = value(min{m, x})` along increasing cutoffs `m`.
pub fn glim_extend_unbounded(proc: &LimitProcedure, x: &SequenceModel, cutoffs: &[f64]) -> Result<ExtensionCurve> {
    if cutoffs.len() < 2 {
        return Err(Error::arg("the extension needs at least two cutoffs"));
    }
    if let Some(c) = cutoffs.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
        return Err(Error::arg(format!("cutoff {c} is not a finite nonnegative number")));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg("cutoffs must be strictly increasing"));
    }
    let values = cutoffs
        .par_iter()
        .map(|&m| proc.value(&x.min_with(m)))
        .collect::<Result<Vec<f64>>>()?;
    let (prev, last) = (values[values.len() - 2], values[values.len() - 1]);
    let verdict = if (last - prev).abs() <= STABILIZATION_TOLERANCE * last.abs() {
        ExtensionVerdict::Finite { value: last }
    } else {
        ExtensionVerdict::Divergent
    };
    Ok(ExtensionCurve {
        procedure: proc.label(),
        horizon: proc.horizon,
        cutoffs: cutoffs.to_vec(),
        values,
        verdict,
    })
}

/// Powers of two `1, 2, …, 2^40`, the cutoffs used to decide boundedness.
pub fn default_cutoffs() -> Vec<f64> {
    (0..=40).map(|k| (k as f64).exp2()).collect()
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ProductNullity {
    /// `value(u·z)`; expected small, reported rather than asserted.
    Residual { value: f64, z_value: f64 },
    PreconditionNotMet { reason: String },
}

/// `value(u·z)` for `z` negligible under the procedure and `u` with a
/// finite extension.
pub fn product_nullity_check(proc: &LimitProcedure, z: &SequenceModel, u: &SequenceModel) -> Result<ProductNullity> {
    let z_value = proc.value(z)?;
    if z_value >= NULLITY_THRESHOLD {
        return Ok(ProductNullity::PreconditionNotMet {
            reason: format!("value(z) = {z_value} is not below {NULLITY_THRESHOLD}"),
        });
    }
    let ext = glim_extend_unbounded(proc, u, &default_cutoffs())?;
    if !ext.is_finite() {
        return Ok(ProductNullity::PreconditionNotMet {
            reason: "the extension of u does not stabilize".into(),
        });
    }
    Ok(ProductNullity::Residual {
        value: proc.value(&u.mul(z))?,
        z_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn procs(n: usize) -> Vec<LimitProcedure> {
        ["cesaro:1", "cesaro:2", "logmean", "dilavg:2,4,8", "dilavg:3@2", "tail:0.1"]
            .iter()
            .map(|s| LimitProcedure::new(s.parse().unwrap(), n).unwrap())
            .collect()
    }

    #[test]
    fn parse_and_label() {
        for s in ["cesaro:2", "logmean", "dilavg:2,4,8", "dilavg:2,3@2", "tail:0.1"] {
            assert_eq!(s.parse::<LimitKind>().unwrap().to_string(), s);
        }
        assert_eq!("dilavg:8,2,4".parse::<LimitKind>().unwrap().to_string(), "dilavg:2,4,8");
        for s in ["cesaro:0", "dilavg:5", "tail:0", "tail:1.5", "median", "dilavg:"] {
            assert!(s.parse::<LimitKind>().is_err(), "{s}");
        }
    }

    #[test]
    fn constant_one_is_exact() {
        let one = SequenceModel::constant(1.0, 1 << 20).unwrap();
        for p in procs(100_000) {
            let e = p.evaluate(&one).unwrap();
            assert_eq!(e.value, 1.0, "{}", p.label());
            assert_eq!(e.shift_residual, 0.0);
            assert_eq!(e.tail_sensitivity, 0.0);
            assert!(e.dilation_residuals.iter().all(|r| r.1 == 0.0));
        }
    }

    #[test]
    fn cesaro_examples() {
        let n = 1_000_000;
        let x = SequenceModel::from_fn("1-1/(n+1)", n, |k| 1.0 - 1.0 / (k as f64 + 1.0));
        let v = LimitProcedure::new(LimitKind::Cesaro { order: 1 }, n).unwrap().value(&x).unwrap();
        let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        // exact defect is H_N / N
        assert!(((1.0 - v) - h / n as f64).abs() < 1e-12);

        let alt = SequenceModel::from_fn("alt", n, |k| (k % 2) as f64);
        let v = LimitProcedure::new(LimitKind::Cesaro { order: 1 }, n).unwrap().value(&alt).unwrap();
        assert!((v - 0.5).abs() <= 1.0 / n as f64);
    }

    #[test]
    fn errors() {
        let x = SequenceModel::zeros(10);
        assert!(LimitProcedure::new(LimitKind::LogMean, 0).unwrap().value(&x).is_err());
        assert!(LimitProcedure::new(LimitKind::LogMean, 11).unwrap().value(&x).is_err());
        let p = LimitProcedure::new(LimitKind::LogMean, 10).unwrap();
        assert!(glim_extend_unbounded(&p, &x, &[2.0, 1.0]).is_err());
        assert!(glim_extend_unbounded(&p, &x, &[1.0]).is_err());
    }

    #[test]
    fn extension_examples() {
        let n = 100_000;
        let p = LimitProcedure::new(LimitKind::Cesaro { order: 1 }, n).unwrap();
        let zero = SequenceModel::zeros(n);
        let c = glim_extend_unbounded(&p, &zero, &[1.0, 2.0, 4.0]).unwrap();
        assert_eq!(c.values, vec![0.0; 3]);
        assert_eq!(c.verdict, ExtensionVerdict::Finite { value: 0.0 });

        let bounded = SequenceModel::from_fn("b", n, |k| 1.0 + (k % 3) as f64);
        let c = glim_extend_unbounded(&p, &bounded, &[4.0, 8.0, 16.0]).unwrap();
        let direct = p.value(&bounded).unwrap();
        assert!(c.values.iter().all(|&v| v == direct));
        assert!(c.is_finite());

        let id = SequenceModel::from_fn("n", n, |k| k as f64);
        let c = glim_extend_unbounded(&p, &id, &[10.0, 100.0, 1000.0]).unwrap();
        assert!(c.values.windows(2).all(|w| w[1] >= w[0]));
        assert!(c.values[2] > 0.98 * 1000.0);
        assert_eq!(c.verdict, ExtensionVerdict::Divergent);
    }

    #[test]
    fn product_nullity_examples() {
        let n = 1_000_000;
        let p = LimitProcedure::new(LimitKind::Cesaro { order: 1 }, n).unwrap();
        let zero = SequenceModel::zeros(n);
        let one = SequenceModel::constant(1.0, n).unwrap();
        match product_nullity_check(&p, &zero, &one).unwrap() {
            ProductNullity::Residual { value, .. } => assert_eq!(value, 0.0),
            other => panic!("{other:?}"),
        }
        let z = SequenceModel::harmonic(n);
        match product_nullity_check(&p, &z, &one).unwrap() {
            ProductNullity::Residual { value, .. } => assert!(value < 1e-4),
            other => panic!("{other:?}"),
        }
        match product_nullity_check(&p, &one, &one).unwrap() {
            ProductNullity::PreconditionNotMet { .. } => {}
            other => panic!("{other:?}"),
        }
    }
}
