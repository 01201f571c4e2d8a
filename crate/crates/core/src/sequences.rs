//! Nonnegative sequences with an explicit evaluation horizon.
//!
//! A [`SequenceModel`] is an immutable expression tree: leaves are explicit
//! buffers or closed-form generators, inner nodes are prefix sums, pointwise
//! arithmetic and the dilation operators. Nothing is materialized unless a
//! caller asks for it, so a generator-backed sequence can be swept to 10^8
//! without a 10^8-entry buffer.
//!
//! Two access paths exist and agree bit-for-bit:
//!
//! * [`SequenceModel::stream`] walks an index range sequentially. This is the
//!   fast path for every sweep in the crate.
//! * [`SequenceModel::get`] evaluates a single index. Prefix-sum nodes keep a
//!   lazily grown table of accumulator checkpoints so random access costs at
//!   most one block of additions.

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

/// Largest explicit buffer accepted by the sequence calculus.
pub const EXPLICIT_CAP: usize = 10_000_000;

/// Horizon given to closed-form generators unless the caller truncates.
pub const GENERATOR_HORIZON: usize = 1 << 40;

const CHECKPOINT_BLOCK: usize = 1 << 12;

pub type Evaluator = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// A lazily evaluated sequence of values on `0..horizon`.
pub type Stream = Box<dyn Iterator<Item = f64> + Send>;

#[derive(Clone)]
pub struct SequenceModel {
    node: Arc<Node>,
    horizon: usize,
}

enum Node {
    Explicit(Arc<[f64]>),
    Generator { label: String, eval: Evaluator },
    Prefix(PrefixNode),
    Binary {
        op: BinaryOp,
        lhs: SequenceModel,
        rhs: SequenceModel,
    },
    Scalar {
        op: ScalarOp,
        inner: SequenceModel,
    },
    DilateUp {
        factor: usize,
        inner: SequenceModel,
    },
    DilateHalf(SequenceModel),
    Stride {
        offset: usize,
        step: usize,
        inner: SequenceModel,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BinaryOp {
    Add,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ScalarOp {
    Scale(f64),
    MinWith(f64),
}

impl BinaryOp {
    #[inline]
    fn apply(self, x: f64, y: f64) -> f64 {
        match self {
            BinaryOp::Add => x + y,
            BinaryOp::Mul => x * y,
            BinaryOp::Div => x / y,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }
}

impl ScalarOp {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            ScalarOp::Scale(c) => c * x,
            ScalarOp::MinWith(c) => x.min(c),
        }
    }
}

struct PrefixNode {
    inner: SequenceModel,
    // checkpoints[j] is the accumulator after summing indices 0..j*BLOCK
    checkpoints: Mutex<Vec<CompensatedSum>>,
}

impl PrefixNode {
    fn state_before(&self, idx: usize) -> CompensatedSum {
        let block = idx / CHECKPOINT_BLOCK;
        let mut state = {
            let mut cps = self.checkpoints.lock().expect("checkpoint table poisoned");
            while cps.len() <= block {
                let last = cps.len() - 1;
                let mut s = cps[last];
                s.extend(self.inner.stream_from(last * CHECKPOINT_BLOCK).take(CHECKPOINT_BLOCK));
                cps.push(s);
            }
            cps[block]
        };
        let base = block * CHECKPOINT_BLOCK;
        state.extend(self.inner.stream_from(base).take(idx - base));
        state
    }
}

/// Entrywise operations exposed to callers.
#[derive(Clone, Copy)]
pub enum Pointwise<'a> {
    Add(&'a SequenceModel),
    Multiply(&'a SequenceModel),
    Scale(f64),
    MinWith(f64),
}

impl SequenceModel {
    fn from_node(node: Node, horizon: usize) -> Self {
        SequenceModel {
            node: Arc::new(node),
            horizon,
        }
    }

    /// Explicit buffer; entries must be finite and nonnegative.
    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::arg("explicit sequence must have at least one entry"));
        }
        if values.len() > EXPLICIT_CAP {
            return Err(Error::arg(format!(
                "explicit buffers are capped at {EXPLICIT_CAP} entries (got {})",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Precondition {
                index: k,
                reason: format!("entry {} is not a finite nonnegative number", values[k]),
            });
        }
        let horizon = values.len();
        Ok(Self::from_node(Node::Explicit(values.into()), horizon))
    }

    /// Closed-form generator. The evaluator must return finite nonnegative
    /// values and be a pure function of the index.
    pub fn from_fn(
        label: impl Into<String>,
        horizon: usize,
        eval: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::from_node(
            Node::Generator {
                label: label.into(),
                eval: Arc::new(eval),
            },
            horizon,
        )
    }

    pub fn constant(c: f64, horizon: usize) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::arg(format!("constant must be finite and nonnegative, got {c}")));
        }
        Ok(Self::from_fn(format!("constant({c})"), horizon, move |_| c))
    }

    pub fn zeros(horizon: usize) -> Self {
        Self::from_fn("zero", horizon, |_| 0.0)
    }

    /// `1/(k+1)`.
    pub fn harmonic(horizon: usize) -> Self {
        Self::from_fn("harmonic", horizon, |k| 1.0 / (k as f64 + 1.0))
    }

    /// `(k+1)^(-beta)`.
    pub fn power_decay(beta: f64, horizon: usize) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::arg(format!("power decay exponent must be > 0, got {beta}")));
        }
        Ok(Self::from_fn(format!("power({beta})"), horizon, move |k| {
            (k as f64 + 1.0).powf(-beta)
        }))
    }

    /// `r^k`.
    pub fn geometric(r: f64, horizon: usize) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::arg(format!("geometric ratio must lie in (0, 1], got {r}")));
        }
        Ok(Self::from_fn(format!("geometric({r})"), horizon, move |k| {
            r.powf(k as f64)
        }))
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn label(&self) -> String {
        match self.node.as_ref() {
            Node::Explicit(_) => format!("explicit[{}]", self.horizon),
            Node::Generator { label, .. } => label.clone(),
            Node::Prefix(p) => format!("prefix({})", p.inner.label()),
            Node::Binary { op, lhs, rhs } => {
                format!("({} {} {})", lhs.label(), op.symbol(), rhs.label())
            }
            Node::Scalar { op, inner } => match op {
                ScalarOp::Scale(c) => format!("{c}*{}", inner.label()),
                ScalarOp::MinWith(c) => format!("min({c}, {})", inner.label()),
            },
            Node::DilateUp { factor, inner } => format!("sigma_{factor}({})", inner.label()),
            Node::DilateHalf(inner) => format!("sigma_1/2({})", inner.label()),
            Node::Stride {
                offset,
                step,
                inner,
            } => format!("{}[{offset}+{step}k]", inner.label()),
        }
    }

    /// Checked random access.
    pub fn get(&self, k: usize) -> Result<f64> {
        if k >= self.horizon {
            return Err(Error::Horizon {
                requested: k,
                horizon: self.horizon,
            });
        }
        Ok(self.value_at(k))
    }

    pub(crate) fn value_at(&self, k: usize) -> f64 {
        debug_assert!(k < self.horizon);
        match self.node.as_ref() {
            Node::Explicit(data) => data.get(k).copied().unwrap_or(0.0),
            Node::Generator { eval, .. } => eval(k),
            Node::Prefix(p) => {
                let mut s = p.state_before(k);
                s.add(p.inner.value_at(k));
                s.value()
            }
            Node::Binary { op, lhs, rhs } => op.apply(lhs.value_at(k), rhs.value_at(k)),
            Node::Scalar { op, inner } => op.apply(inner.value_at(k)),
            Node::DilateUp { factor, inner } => inner.value_at(k / factor),
            Node::DilateHalf(inner) => (inner.value_at(2 * k) + inner.value_at(2 * k + 1)) / 2.0,
            Node::Stride {
                offset,
                step,
                inner,
            } => inner.value_at(offset + step * k),
        }
    }

    /// Sequential evaluation of `start..horizon`.
    pub fn stream(&self, start: usize) -> Result<Stream> {
        if start > self.horizon {
            return Err(Error::Horizon {
                requested: start,
                horizon: self.horizon,
            });
        }
        Ok(self.stream_from(start))
    }

    /// Sequential evaluation of `0..horizon`.
    pub fn iter(&self) -> Stream {
        self.stream_from(0)
    }

    fn stream_from(&self, start: usize) -> Stream {
        let len = self.horizon.saturating_sub(start);
        match self.node.as_ref() {
            Node::Explicit(data) => {
                let data = Arc::clone(data);
                Box::new((start..start + len).map(move |k| data.get(k).copied().unwrap_or(0.0)))
            }
            Node::Generator { eval, .. } => {
                let eval = Arc::clone(eval);
                Box::new((start..start + len).map(move |k| eval(k)))
            }
            Node::Prefix(p) => {
                let mut state = if start == 0 {
                    CompensatedSum::new()
                } else {
                    p.state_before(start)
                };
                Box::new(p.inner.stream_from(start).take(len).map(move |v| {
                    state.add(v);
                    state.value()
                }))
            }
            Node::Binary { op, lhs, rhs } => {
                let op = *op;
                Box::new(
                    lhs.stream_from(start)
                        .zip(rhs.stream_from(start))
                        .take(len)
                        .map(move |(x, y)| op.apply(x, y)),
                )
            }
            Node::Scalar { op, inner } => {
                let op = *op;
                Box::new(inner.stream_from(start).take(len).map(move |x| op.apply(x)))
            }
            Node::DilateUp { factor, inner } => {
                let n = *factor;
                Box::new(
                    inner
                        .stream_from(start / n)
                        .flat_map(move |v| std::iter::repeat_n(v, n))
                        .skip(start % n)
                        .take(len),
                )
            }
            Node::DilateHalf(inner) => Box::new(PairMean {
                inner: inner.stream_from(2 * start),
            }
            .take(len)),
            Node::Stride {
                offset,
                step,
                inner,
            } => Box::new(inner.stream_from(offset + step * start).step_by(*step).take(len)),
        }
    }

    /// First `n` entries as a vector.
    pub fn to_vec(&self, n: usize) -> Result<Vec<f64>> {
        if n > self.horizon {
            return Err(Error::Horizon {
                requested: n,
                horizon: self.horizon,
            });
        }
        if n > EXPLICIT_CAP {
            return Err(Error::arg(format!(
                "cannot materialize {n} entries (cap {EXPLICIT_CAP})"
            )));
        }
        Ok(self.iter().take(n).collect())
    }

    /// The same sequence restricted to `0..n`.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n > self.horizon {
            return Err(Error::Horizon {
                requested: n,
                horizon: self.horizon,
            });
        }
        Ok(SequenceModel {
            node: Arc::clone(&self.node),
            horizon: n,
        })
    }

    /// Extend an explicit buffer by zeros up to `horizon`.
    pub fn padded(&self, horizon: usize) -> Result<Self> {
        match self.node.as_ref() {
            Node::Explicit(_) if horizon >= self.horizon => Ok(SequenceModel {
                node: Arc::clone(&self.node),
                horizon,
            }),
            Node::Explicit(_) => self.truncate(horizon),
            _ => Err(Error::arg("only explicit buffers can be zero-padded")),
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.node.as_ref(), Node::Explicit(_))
    }

    fn binary(&self, op: BinaryOp, other: &SequenceModel) -> SequenceModel {
        let horizon = self.horizon.min(other.horizon);
        Self::from_node(
            Node::Binary {
                op,
                lhs: self.clone(),
                rhs: other.clone(),
            },
            horizon,
        )
    }

    fn scalar(&self, op: ScalarOp) -> SequenceModel {
        Self::from_node(
            Node::Scalar {
                op,
                inner: self.clone(),
            },
            self.horizon,
        )
    }

    pub fn add(&self, other: &SequenceModel) -> SequenceModel {
        self.binary(BinaryOp::Add, other)
    }

    pub fn mul(&self, other: &SequenceModel) -> SequenceModel {
        self.binary(BinaryOp::Mul, other)
    }

    /// Entrywise quotient. Callers guarantee a strictly positive denominator.
    pub fn ratio(&self, denominator: &SequenceModel) -> SequenceModel {
        self.binary(BinaryOp::Div, denominator)
    }

    pub fn scale(&self, c: f64) -> SequenceModel {
        self.scalar(ScalarOp::Scale(c))
    }

    pub fn min_with(&self, c: f64) -> SequenceModel {
        self.scalar(ScalarOp::MinWith(c))
    }

    /// `x(k + offset)`.
    pub fn shift(&self, offset: usize) -> SequenceModel {
        self.stride(offset, 1)
    }

    /// `x(offset + step*k)`.
    pub fn stride(&self, offset: usize, step: usize) -> SequenceModel {
        assert!(step >= 1, "stride step must be positive");
        let horizon = if self.horizon > offset {
            (self.horizon - offset).div_ceil(step)
        } else {
            0
        };
        Self::from_node(
            Node::Stride {
                offset,
                step,
                inner: self.clone(),
            },
            horizon,
        )
    }

    /// Running sums `Σ_{k≤m} x(k)` over the whole horizon.
    pub fn cumulative(&self) -> SequenceModel {
        Self::from_node(
            Node::Prefix(PrefixNode {
                inner: self.clone(),
                checkpoints: Mutex::new(vec![CompensatedSum::new()]),
            }),
            self.horizon,
        )
    }
}

impl fmt::Debug for SequenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceModel")
            .field("label", &self.label())
            .field("horizon", &self.horizon)
            .finish()
    }
}

struct PairMean {
    inner: Stream,
}

impl Iterator for PairMean {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let x = self.inner.next()?;
        let y = self.inner.next()?;
        Some((x + y) / 2.0)
    }
}

/// A sequence known to be nonincreasing and nonnegative.
#[derive(Clone, Debug)]
pub struct DecreasingSequence(SequenceModel);

impl DecreasingSequence {
    /// Validates by a full scan; the horizon must be at most [`EXPLICIT_CAP`].
    pub fn new(model: SequenceModel) -> Result<Self> {
        if model.horizon() > EXPLICIT_CAP {
            return Err(Error::arg(format!(
                "cannot validate monotonicity over {} entries; use a named generator",
                model.horizon()
            )));
        }
        let mut prev = f64::INFINITY;
        for (k, v) in model.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Precondition {
                    index: k,
                    reason: format!("entry {v} is not a finite nonnegative number"),
                });
            }
            if v > prev {
                return Err(Error::Precondition {
                    index: k,
                    reason: format!("entry {v} exceeds its predecessor {prev}"),
                });
            }
            prev = v;
        }
        Ok(DecreasingSequence(model))
    }

    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        Self::new(SequenceModel::from_vec(values)?)
    }

    /// Wraps a model whose monotonicity is guaranteed by construction.
    pub fn new_unchecked(model: SequenceModel) -> Self {
        DecreasingSequence(model)
    }

    pub fn model(&self) -> &SequenceModel {
        &self.0
    }

    pub fn into_model(self) -> SequenceModel {
        self.0
    }

    pub fn truncate(&self, n: usize) -> Result<Self> {
        Ok(DecreasingSequence(self.0.truncate(n)?))
    }

    /// `σ_n` maps decreasing sequences to decreasing sequences.
    pub fn dilate_up(&self, n: usize) -> Result<Self> {
        Ok(DecreasingSequence(dilate_up(&self.0, n)?))
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::arg(format!("scale must be finite and nonnegative, got {c}")));
        }
        Ok(DecreasingSequence(self.0.scale(c)))
    }

    /// Entrywise sum of two decreasing sequences, which is again decreasing.
    pub fn plus(&self, other: &DecreasingSequence) -> DecreasingSequence {
        DecreasingSequence(self.0.add(&other.0))
    }
}

impl std::ops::Deref for DecreasingSequence {
    type Target = SequenceModel;

    fn deref(&self) -> &SequenceModel {
        &self.0
    }
}

/// The first `n` entries of `x` sorted nonincreasingly.
pub fn decreasing_rearrangement(x: &SequenceModel, n: usize) -> Result<DecreasingSequence> {
    let mut values = x.to_vec(n)?;
    if n == 0 {
        return Err(Error::arg("rearrangement length must be positive"));
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(DecreasingSequence(SequenceModel::from_vec(values)?))
}

/// `m ↦ Σ_{k≤m} x(k)` for `m < n`.
pub fn prefix_sums(x: &SequenceModel, n: usize) -> Result<SequenceModel> {
    Ok(x.truncate(n)?.cumulative())
}

/// `σ_n`: repeat every entry `n` times.
pub fn dilate_up(x: &SequenceModel, n: usize) -> Result<SequenceModel> {
    if n == 0 {
        return Err(Error::arg("dilation factor must be at least 1"));
    }
    if n == 1 {
        return Ok(x.clone());
    }
    Ok(SequenceModel::from_node(
        Node::DilateUp {
            factor: n,
            inner: x.clone(),
        },
        x.horizon().saturating_mul(n),
    ))
}

/// `σ_{1/2}`: average consecutive pairs.
pub fn dilate_half(x: &SequenceModel) -> Result<SequenceModel> {
    if x.horizon() < 2 {
        return Err(Error::arg("σ_1/2 needs a horizon of at least 2"));
    }
    Ok(SequenceModel::from_node(
        Node::DilateHalf(x.clone()),
        x.horizon() / 2,
    ))
}

pub fn pointwise(x: &SequenceModel, op: Pointwise<'_>) -> Result<SequenceModel> {
    Ok(match op {
        Pointwise::Add(y) => x.add(y),
        Pointwise::Multiply(y) => x.mul(y),
        Pointwise::Scale(c) => {
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::arg(format!("scale must be finite and nonnegative, got {c}")));
            }
            x.scale(c)
        }
        Pointwise::MinWith(c) => {
            if c.is_nan() || c < 0.0 {
                return Err(Error::arg(format!("cutoff must be nonnegative, got {c}")));
            }
            x.min_with(c)
        }
    })
}
