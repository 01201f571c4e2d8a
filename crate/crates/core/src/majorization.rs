//! Hardy–Littlewood submajorization and the constructions built on it.
//!
//! `b ≺≺ a` means every prefix sum of the decreasing rearrangement of `b` is
//! dominated by the corresponding prefix sum of `a`. This module provides
//! the checker, the wedge `a ∧ b` (the decreasing sequence whose prefix-sum
//! curve is the pointwise minimum of the two curves), and certified splits
//! `b = b1 + b2` with `b1 ≺≺ a1`, `b2 ≺≺ a2` whenever `b ≺≺ a1 + a2`.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequences::{decreasing_rearrangement, DecreasingSequence, SequenceModel};
use crate::summation::{compensated_sum, CompensatedSum};

/// Absolute slack tolerance for real-valued certificates, per unit of mass.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-12;

const EXCHANGE_MAX_LEN: usize = 64;
const EXCHANGE_MAX_UNITS: i64 = 4096;
const EXHAUSTIVE_MAX_LEN: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct SubmajorizationReport {
    pub holds: bool,
    pub first_violation: Option<usize>,
    /// Running minimum of `Σ_{k≤m} a(k) − Σ_{k≤m} b(k)`.
    pub slack: Vec<f64>,
    pub min_slack: f64,
    /// Minimum of the slack divided by the larger of the two prefix sums.
    pub min_relative_slack: f64,
}

impl SubmajorizationReport {
    pub fn slack_curve(&self) -> Result<SequenceModel> {
        SequenceModel::from_vec(self.slack.iter().map(|s| s.max(0.0)).collect())
    }
}

/// Exact check of `Σ_{k≤m} b(k) ≤ Σ_{k≤m} a(k)` for all `m < n`.
pub fn check_submajorized(
    b: &DecreasingSequence,
    a: &DecreasingSequence,
    n: usize,
) -> Result<SubmajorizationReport> {
    check_submajorized_tol(b, a, n, 0.0)
}

/// As [`check_submajorized`], accepting a violation of at most `tol`
/// relative to the larger prefix sum.
pub fn check_submajorized_tol(
    b: &DecreasingSequence,
    a: &DecreasingSequence,
    n: usize,
    tol: f64,
) -> Result<SubmajorizationReport> {
    if n == 0 {
        return Err(Error::arg("submajorization length must be positive"));
    }
    for seq in [a, b] {
        if seq.horizon() < n {
            return Err(Error::Horizon {
                requested: n,
                horizon: seq.horizon(),
            });
        }
    }
    let mut sa = CompensatedSum::new();
    let mut sb = CompensatedSum::new();
    let mut slack = Vec::with_capacity(n);
    let mut running = f64::INFINITY;
    let mut min_relative = f64::INFINITY;
    let mut first_violation = None;
    for (m, (x, y)) in a.iter().zip(b.iter()).take(n).enumerate() {
        sa.add(x);
        sb.add(y);
        let (pa, pb) = (sa.value(), sb.value());
        let diff = pa - pb;
        let scale = pa.abs().max(pb.abs());
        let relative = if scale > 0.0 { diff / scale } else { 0.0 };
        if first_violation.is_none() && relative < -tol && diff < 0.0 {
            first_violation = Some(m);
        }
        running = running.min(diff);
        min_relative = min_relative.min(relative);
        slack.push(running);
    }
    Ok(SubmajorizationReport {
        holds: first_violation.is_none(),
        first_violation,
        min_slack: running,
        min_relative_slack: min_relative,
        slack,
    })
}

/// The decreasing sequence whose prefix sums are `min{Σa, Σb}` on `0..n`.
pub fn wedge(a: &DecreasingSequence, b: &DecreasingSequence, n: usize) -> Result<DecreasingSequence> {
    if n == 0 {
        return Err(Error::arg("wedge length must be positive"));
    }
    for seq in [a, b] {
        if seq.horizon() < n {
            return Err(Error::Horizon {
                requested: n,
                horizon: seq.horizon(),
            });
        }
    }
    let mut out = Vec::with_capacity(n);
    let mut sa = CompensatedSum::new();
    let mut sb = CompensatedSum::new();
    let mut prev_min = 0.0;
    let mut prev_on_a = true;
    for (m, (x, y)) in a.iter().zip(b.iter()).take(n).enumerate() {
        sa.add(x);
        sb.add(y);
        let (pa, pb) = (sa.value(), sb.value());
        let on_a = pa <= pb;
        let cur_min = if on_a { pa } else { pb };
        let d = if m == 0 {
            x.min(y)
        } else if on_a == prev_on_a {
            if on_a {
                x
            } else {
                y
            }
        } else {
            // At a crossing the increment lies between the two entries; the
            // clamp keeps the output nonincreasing under rounding.
            (cur_min - prev_min).clamp(x.min(y), x.max(y))
        };
        out.push(d);
        prev_min = cur_min;
        prev_on_a = on_a;
    }
    Ok(DecreasingSequence::new_unchecked(SequenceModel::from_vec(out)?))
}

/// `y1 = min{y, x1}`, `y2 = y − y1` given `0 ≤ y ≤ x1 + x2`.
pub fn split_pointwise(
    y: &SequenceModel,
    x1: &SequenceModel,
    x2: &SequenceModel,
) -> Result<(SequenceModel, SequenceModel)> {
    let n = y.horizon().min(x1.horizon()).min(x2.horizon());
    let (yv, x1v, x2v) = (y.to_vec(n)?, x1.to_vec(n)?, x2.to_vec(n)?);
    let mut y1 = Vec::with_capacity(n);
    let mut y2 = Vec::with_capacity(n);
    for k in 0..n {
        if yv[k] < 0.0 || yv[k] > x1v[k] + x2v[k] {
            return Err(Error::Precondition {
                index: k,
                reason: format!(
                    "need 0 <= y <= x1 + x2, got y = {}, x1 + x2 = {}",
                    yv[k],
                    x1v[k] + x2v[k]
                ),
            });
        }
        let first = yv[k].min(x1v[k]);
        y1.push(first);
        y2.push(yv[k] - first);
    }
    Ok((SequenceModel::from_vec(y1)?, SequenceModel::from_vec(y2)?))
}

/// Sum of the `m` largest entries of `x` over its horizon.
pub fn top_m_sum(x: &SequenceModel, m: usize) -> Result<f64> {
    if m > x.horizon() {
        return Err(Error::Horizon {
            requested: m,
            horizon: x.horizon(),
        });
    }
    if m == 0 {
        return Ok(0.0);
    }
    let mut v = x.to_vec(x.horizon())?;
    v.select_nth_unstable_by(m - 1, |a, b| b.total_cmp(a));
    v.truncate(m);
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(compensated_sum(v))
}

/// Which construction produced a decomposition certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificatePath {
    /// Unit-by-unit augmenting paths; exact on integer inputs.
    IntegerExchange,
    /// Doubly stochastic transfers from `a1 + a2` onto a majorant of `b`.
    TransferConstruction,
    /// Depth-first search over integer splits (short integer inputs only).
    ExhaustiveSearch,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionCertificate {
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub report1: SubmajorizationReport,
    pub report2: SubmajorizationReport,
    pub path: CertificatePath,
    /// Tolerance used when verifying the reports (0 for integer inputs).
    pub tolerance: f64,
}

impl DecompositionCertificate {
    pub fn b1_model(&self) -> Result<SequenceModel> {
        SequenceModel::from_vec(self.b1.clone())
    }

    pub fn b2_model(&self) -> Result<SequenceModel> {
        SequenceModel::from_vec(self.b2.clone())
    }
}

/// Split `b` into `b1 + b2` with `b1 ≺≺ a1` and `b2 ≺≺ a2` on the first `n`
/// entries, given `b ≺≺ a1 + a2`.
pub fn decompose_submajorized(
    b: &DecreasingSequence,
    a1: &DecreasingSequence,
    a2: &DecreasingSequence,
    n: usize,
) -> Result<DecompositionCertificate> {
    if n == 0 {
        return Err(Error::arg("decomposition length must be positive"));
    }
    let bv = b.to_vec(n)?;
    let a1v = a1.to_vec(n)?;
    let a2v = a2.to_vec(n)?;
    let integral = [&bv, &a1v, &a2v]
        .iter()
        .all(|v| v.iter().all(|&x| x == x.trunc() && x < (1u64 << 40) as f64));
    let tolerance = if integral { 0.0 } else { CERTIFICATE_TOLERANCE };

    let sum = DecreasingSequence::new_unchecked(a1.truncate(n)?.plus(&a2.truncate(n)?).into_model());
    let pre = check_submajorized_tol(&b.truncate(n)?, &sum, n, tolerance)?;
    if let Some(index) = pre.first_violation {
        return Err(Error::NotSubmajorized { index });
    }

    let mut attempts: Vec<CertificatePath> = Vec::new();
    if integral {
        let to_int = |v: &[f64]| v.iter().map(|&x| x as i64).collect::<Vec<i64>>();
        let (bi, a1i, a2i) = (to_int(&bv), to_int(&a1v), to_int(&a2v));
        if n <= EXCHANGE_MAX_LEN && bi.iter().sum::<i64>() <= EXCHANGE_MAX_UNITS {
            attempts.push(CertificatePath::IntegerExchange);
            if let Some((x, y)) = exchange_split(&bi, &a1i, &a2i) {
                if let Some(cert) = certify(&bv, &x, &y, a1, a2, n, 0.0, CertificatePath::IntegerExchange)? {
                    return Ok(cert);
                }
            }
        }
        if n <= EXHAUSTIVE_MAX_LEN {
            attempts.push(CertificatePath::ExhaustiveSearch);
            if let Some((x, y)) = exhaustive_split(&bi, &a1i, &a2i) {
                if let Some(cert) = certify(&bv, &x, &y, a1, a2, n, 0.0, CertificatePath::ExhaustiveSearch)? {
                    return Ok(cert);
                }
            }
        }
    }

    attempts.push(CertificatePath::TransferConstruction);
    let (x, y) = transfer_split(&bv, &a1v, &a2v);
    let transfer_tol = CERTIFICATE_TOLERANCE.max(if integral { CERTIFICATE_TOLERANCE } else { tolerance });
    if let Some(cert) = certify_f64(&bv, x, y, a1, a2, n, transfer_tol)? {
        return Ok(cert);
    }
    Err(Error::SolverDefect(format!("tried {attempts:?}")))
}

#[allow(clippy::too_many_arguments)]
fn certify(
    b: &[f64],
    x: &[i64],
    y: &[i64],
    a1: &DecreasingSequence,
    a2: &DecreasingSequence,
    n: usize,
    tol: f64,
    path: CertificatePath,
) -> Result<Option<DecompositionCertificate>> {
    let b1: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    let b2: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    if b1.iter().zip(&b2).zip(b).any(|((p, q), s)| p + q != *s || *p < 0.0 || *q < 0.0) {
        return Ok(None);
    }
    finish(b1, b2, a1, a2, n, tol, path)
}

fn certify_f64(
    b: &[f64],
    b1: Vec<f64>,
    b2: Vec<f64>,
    a1: &DecreasingSequence,
    a2: &DecreasingSequence,
    n: usize,
    tol: f64,
) -> Result<Option<DecompositionCertificate>> {
    let sum_ok = b1
        .iter()
        .zip(&b2)
        .zip(b)
        .all(|((p, q), s)| *p >= 0.0 && *q >= 0.0 && (p + q - s).abs() <= CERTIFICATE_TOLERANCE * s.max(1.0));
    if !sum_ok {
        return Ok(None);
    }
    finish(b1, b2, a1, a2, n, tol, CertificatePath::TransferConstruction)
}

fn finish(
    b1: Vec<f64>,
    b2: Vec<f64>,
    a1: &DecreasingSequence,
    a2: &DecreasingSequence,
    n: usize,
    tol: f64,
    path: CertificatePath,
) -> Result<Option<DecompositionCertificate>> {
    let r1 = decreasing_rearrangement(&SequenceModel::from_vec(b1.clone())?, n)?;
    let r2 = decreasing_rearrangement(&SequenceModel::from_vec(b2.clone())?, n)?;
    let report1 = check_submajorized_tol(&r1, a1, n, tol)?;
    let report2 = check_submajorized_tol(&r2, a2, n, tol)?;
    if !(report1.holds && report2.holds) {
        return Ok(None);
    }
    Ok(Some(DecompositionCertificate {
        b1,
        b2,
        report1,
        report2,
        path,
        tolerance: tol,
    }))
}

/// Top-sum feasibility of an integer vector against prefix capacities.
fn fits(y: &[i64], caps: &[i64]) -> bool {
    let mut sorted = y.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut acc = 0;
    for (m, v) in sorted.iter().enumerate() {
        acc += v;
        if acc > caps[m + 1] {
            return false;
        }
    }
    true
}

fn capacities(a: &[i64]) -> Vec<i64> {
    let mut caps = vec![0; a.len() + 1];
    for (k, v) in a.iter().enumerate() {
        caps[k + 1] = caps[k] + v;
    }
    caps
}

/// Matroid-partition style insertion of the units of `b`, one at a time,
/// along shortest exchange paths between the two summands.
fn exchange_split(b: &[i64], a1: &[i64], a2: &[i64]) -> Option<(Vec<i64>, Vec<i64>)> {
    let n = b.len();
    let caps = [capacities(a1), capacities(a2)];
    let mut parts = [vec![0i64; n], vec![0i64; n]];
    // node = position * 3 + owner, owner 0 = unplaced, 1/2 = part index + 1
    const UNPLACED: usize = 0;
    for s in 0..n {
        for _ in 0..b[s] {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; 3 * n];
            let mut seen = vec![false; 3 * n];
            let start = s * 3 + UNPLACED;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            let mut sink: Option<(usize, usize)> = None;
            'bfs: while let Some(node) = queue.pop_front() {
                let (pos, owner) = (node / 3, node % 3);
                for part in 0..2 {
                    if owner == part + 1 {
                        continue;
                    }
                    let mut trial = parts[part].clone();
                    trial[pos] += 1;
                    if fits(&trial, &caps[part]) {
                        sink = Some((node, part));
                        break 'bfs;
                    }
                }
                for part in 0..2 {
                    if owner == part + 1 {
                        continue;
                    }
                    for p in 0..n {
                        let target = p * 3 + part + 1;
                        if parts[part][p] == 0 || seen[target] {
                            continue;
                        }
                        let mut trial = parts[part].clone();
                        trial[pos] += 1;
                        trial[p] -= 1;
                        if fits(&trial, &caps[part]) {
                            seen[target] = true;
                            prev[target] = Some((node, part));
                            queue.push_back(target);
                        }
                    }
                }
            }
            let (mut node, part) = sink?;
            parts[part][node / 3] += 1;
            // walk back: each hop moved the predecessor's unit into `via`
            // in place of the unit at `node`
            while let Some((pred, via)) = prev[node] {
                parts[via][pred / 3] += 1;
                parts[via][node / 3] -= 1;
                node = pred;
            }
        }
    }
    let [x, y] = parts;
    Some((x, y))
}

fn exhaustive_split(b: &[i64], a1: &[i64], a2: &[i64]) -> Option<(Vec<i64>, Vec<i64>)> {
    let caps = [capacities(a1), capacities(a2)];
    let n = b.len();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);

    fn dfs(k: usize, b: &[i64], caps: &[Vec<i64>; 2], x: &mut Vec<i64>, y: &mut Vec<i64>) -> bool {
        if k == b.len() {
            return true;
        }
        for v in (0..=b[k]).rev() {
            x.push(v);
            y.push(b[k] - v);
            if fits(x, &caps[0]) && fits(y, &caps[1]) && dfs(k + 1, b, caps, x, y) {
                return true;
            }
            x.pop();
            y.pop();
        }
        false
    }

    dfs(0, b, &caps, &mut x, &mut y).then_some((x, y))
}

/// Raise the smallest entries of the decreasing vector `b` to a common level
/// so the total grows by `extra`. Among all `u ≥ b` with that total this is
/// the least element in the majorization order.
fn water_fill(b: &[f64], extra: f64) -> Vec<f64> {
    let n = b.len();
    let mut u = b.to_vec();
    if extra <= 0.0 {
        return u;
    }
    let mut tail = 0.0;
    let mut level = 0.0;
    let mut from = 0;
    for k0 in (0..n).rev() {
        tail += b[k0];
        level = (tail + extra) / (n - k0) as f64;
        from = k0;
        if k0 == 0 || level <= b[k0 - 1] {
            break;
        }
    }
    for v in &mut u[from..] {
        *v = v.max(level);
    }
    u
}

/// Doubly stochastic construction: find `u ≥ b` with `u ≺ a1 + a2`, reach
/// `u` from `a1 + a2` by pairwise transfers, apply the same transfers to
/// `a1` and `a2`, then scale down by `b / u`.
fn transfer_split(b: &[f64], a1: &[f64], a2: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = b.len();
    let mut cur: Vec<f64> = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
    let extra = compensated_sum(cur.iter().copied()) - compensated_sum(b.iter().copied());
    let target = water_fill(b, extra);
    let mut p1 = a1.to_vec();
    let mut p2 = a2.to_vec();

    let mut surplus: BTreeSet<usize> = (0..n).filter(|&i| cur[i] > target[i]).collect();
    let mut deficit: BTreeSet<usize> = (0..n).filter(|&i| cur[i] < target[i]).collect();
    while let Some(&j) = surplus.last() {
        let Some(&k) = deficit.range(j + 1..).next() else {
            break;
        };
        let give = cur[j] - target[j];
        let take = target[k] - cur[k];
        let delta = give.min(take);
        let gap = cur[j] - cur[k];
        let t = if gap > 0.0 { (delta / gap).min(1.0) } else { 0.0 };
        for p in [&mut p1, &mut p2] {
            let (pj, pk) = (p[j], p[k]);
            p[j] = (1.0 - t) * pj + t * pk;
            p[k] = t * pj + (1.0 - t) * pk;
        }
        if give <= take {
            cur[j] = target[j];
            cur[k] += delta;
            surplus.remove(&j);
            if cur[k] >= target[k] {
                deficit.remove(&k);
            }
        } else {
            cur[k] = target[k];
            cur[j] -= delta;
            deficit.remove(&k);
        }
    }

    let mut b1 = Vec::with_capacity(n);
    let mut b2 = Vec::with_capacity(n);
    for k in 0..n {
        let total = p1[k] + p2[k];
        let first = if b[k] == 0.0 || total <= 0.0 {
            0.0
        } else {
            (p1[k].max(0.0) * (b[k] / total)).clamp(0.0, b[k])
        };
        b1.push(first);
        b2.push(b[k] - first);
    }
    (b1, b2)
}
