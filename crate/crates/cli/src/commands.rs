use std::path::Path;

use anyhow::Result;
use rayon::prelude::*;
use serde_json::{json, Value};
use singtrace_core::dixmier::{
    additivity_audit, additivity_audit_matrices, additivity_criterion, dixmier_estimate_with, measurability_report,
    normal_part_estimate_with, prefunctional, EstimateOptions,
};
use singtrace_core::ideals::{direct_sum_norm_rate, marcinkiewicz_norm, model_sequence, psi_diagnostics, psi_named, ModelSpec};
use singtrace_core::io::{read_matrix_csv, read_sequence_csv, write_curve_csv};
use singtrace_core::majorization::{check_submajorized, decompose_submajorized, wedge};
use singtrace_core::sequences::decreasing_rearrangement;
use singtrace_core::spectra::{singular_values, DenseMatrix};
use singtrace_core::{DecreasingSequence, Error, LimitKind, LimitProcedure, SequenceModel};

use crate::output::RunRecord;
use crate::{Command, CurveArg, TraceArgs};

/// Sequences are echoed in full only up to this length.
const MAX_LISTED: usize = 10_000;

pub fn run(command: Command) -> Result<RunRecord> {
    match command {
        Command::Mu { matrix, seq, n, curve } => mu(matrix, seq, n, &curve),
        Command::Submaj { b, a, n, curve } => submaj(&b, &a, n, &curve),
        Command::Wedge { a, b, n, curve } => wedge_cmd(&a, &b, n, &curve),
        Command::Decompose { b, a1, a2, n } => decompose(&b, &a1, &a2, n),
        Command::Norm { seq, psi, horizon, curve } => {
            let a = model_sequence(&seq)?;
            let psi_fn = psi_named(&psi)?;
            let result = marcinkiewicz_norm(&a, &psi_fn, horizon)?;
            write_sequence_curve(&curve, &prefunctional(a.model(), &psi_fn)?, horizon)?;
            let mut record = RunRecord::new(
                "norm",
                json!({ "seq": seq.to_string(), "psi": psi.to_string() }),
                serde_json::to_value(&result)?,
            )
            .horizon(horizon);
            if !result.attained_within_horizon {
                record = record.diagnostic("the running maximum still moved in the last decade of the horizon");
            }
            Ok(record)
        }
        Command::PsiDiagnose { psi, horizon, grid, curve } => {
            let psi_fn = psi_named(&psi)?;
            let diag = psi_diagnostics(&psi_fn, horizon, grid)?;
            let points: Vec<(f64, f64)> = diag.samples.iter().map(|&(t, r)| (t as f64, r)).collect();
            write_points(&curve, &points)?;
            Ok(RunRecord::new(
                "psi-diagnose",
                json!({ "psi": psi.to_string(), "grid": grid }),
                serde_json::to_value(&diag)?,
            )
            .horizon(horizon)
            .diagnostic("liminf/limsup estimates are horizon-limited"))
        }
        Command::Trace { args, curve } => trace(&args, &curve),
        Command::Criterion { psi, limit, horizon, tol, curve } => {
            let psi_fn = psi_named(&psi)?;
            let proc = LimitProcedure::new(limit, horizon)?;
            let value = additivity_criterion(&psi_fn, &proc)?;
            let shifted = psi_fn.shifted_values();
            write_sequence_curve(&curve, &shifted.stride(0, 2).ratio(shifted), horizon)?;
            let deviation = (value - 1.0).abs();
            Ok(RunRecord::new(
                "criterion",
                json!({ "psi": psi.to_string(), "tol": tol }),
                json!({ "value": value, "deviation": deviation, "pass": deviation <= tol }),
            )
            .horizon(horizon)
            .procedure(proc.label()))
        }
        Command::Measurability {
            seq,
            psi,
            limits,
            horizon,
            band_horizon,
            spread_tol,
            band_tol,
            curve,
        } => {
            let limits = if limits.is_empty() {
                vec![LimitKind::Cesaro { order: 1 }, LimitKind::LogMean, LimitKind::default()]
            } else {
                limits
            };
            let procs = limits
                .into_iter()
                .map(|k| LimitProcedure::new(k, horizon))
                .collect::<singtrace_core::Result<Vec<_>>>()?;
            let a = model_sequence(&seq)?;
            let psi_fn = psi_named(&psi)?;
            let band_horizon = band_horizon.unwrap_or(horizon);
            let options = EstimateOptions {
                spread_tolerance: spread_tol,
                band_tolerance: band_tol,
            };
            let report = measurability_report(a.model(), &psi_fn, &procs, band_horizon, &options)?;
            write_sequence_curve(&curve, &prefunctional(a.model(), &psi_fn)?, band_horizon)?;
            let labels: Vec<String> = procs.iter().map(LimitProcedure::label).collect();
            Ok(RunRecord::new(
                "measurability",
                json!({ "seq": seq.to_string(), "psi": psi.to_string(), "limits": labels }),
                serde_json::to_value(&report)?,
            )
            .horizon(horizon))
        }
        Command::NormalPart { args, cutoffs, curve } => {
            let a = model_sequence(&args.seq)?;
            let psi_fn = psi_named(&args.psi)?;
            let proc = LimitProcedure::new(args.limit.clone(), args.horizon)?;
            let est = normal_part_estimate_with(&a, &psi_fn, &proc, &cutoffs, &options(&args))?;
            let points: Vec<(f64, f64)> = cutoffs.iter().copied().zip(est.extension.values.iter().copied()).collect();
            write_points(&curve, &points)?;
            Ok(RunRecord::new(
                "normal-part",
                json!({ "seq": args.seq.to_string(), "psi": args.psi.to_string(), "cutoffs": cutoffs, "band_tol": args.band_tol }),
                serde_json::to_value(&est)?,
            )
            .horizon(args.horizon)
            .procedure(proc.label()))
        }
        Command::Dichotomy { seq, psi, ns, blocks, curve } => {
            let a = model_sequence(&seq)?;
            let psi_fn = psi_named(&psi)?;
            let rates = ns
                .par_iter()
                .map(|&n| {
                    let horizon = n.checked_mul(blocks).ok_or_else(|| {
                        Error::Argument(format!("horizon n·blocks overflows for n = {n}"))
                    })?;
                    Ok((n, horizon, direct_sum_norm_rate(&a, &psi_fn, n, horizon)?))
                })
                .collect::<singtrace_core::Result<Vec<_>>>()?;
            let points: Vec<(f64, f64)> = rates.iter().map(|&(n, _, r)| (n as f64, r)).collect();
            write_points(&curve, &points)?;
            let rows: Vec<Value> = rates
                .iter()
                .map(|&(n, h, r)| json!({ "n": n, "horizon": h, "rate": r }))
                .collect();
            Ok(RunRecord::new(
                "dichotomy",
                json!({ "seq": seq.to_string(), "psi": psi.to_string(), "ns": ns, "blocks": blocks }),
                json!({ "rates": rows }),
            )
            .diagnostic("rate(n) = ‖a^{⊕n}‖ / n over the first `blocks` blocks of σ_n a"))
        }
        Command::Audit {
            a,
            b,
            matrix_a,
            matrix_b,
            psi,
            limit,
            horizon,
        } => {
            let psi_fn = psi_named(&psi)?;
            let proc = LimitProcedure::new(limit, horizon)?;
            let (audit, parameters) = match (matrix_a, matrix_b) {
                (Some(ma), Some(mb)) => {
                    let (da, db) = (load_matrix(&ma)?, load_matrix(&mb)?);
                    (
                        additivity_audit_matrices(&da, &db, &psi_fn, &proc)?,
                        json!({ "matrix_a": ma, "matrix_b": mb, "psi": psi.to_string() }),
                    )
                }
                _ => {
                    let (a, b) = (a.expect("clap requires --a"), b.expect("clap requires --b"));
                    (
                        additivity_audit(&model_sequence(&a)?, &model_sequence(&b)?, &psi_fn, &proc)?,
                        json!({ "a": a.to_string(), "b": b.to_string(), "psi": psi.to_string() }),
                    )
                }
            };
            Ok(RunRecord::new("audit", parameters, serde_json::to_value(&audit)?)
                .horizon(horizon)
                .procedure(proc.label()))
        }
    }
}

fn options(args: &TraceArgs) -> EstimateOptions {
    EstimateOptions {
        band_tolerance: args.band_tol,
        ..EstimateOptions::default()
    }
}

fn trace(args: &TraceArgs, curve: &CurveArg) -> Result<RunRecord> {
    let a = model_sequence(&args.seq)?;
    let psi_fn = psi_named(&args.psi)?;
    let proc = LimitProcedure::new(args.limit.clone(), args.horizon)?;
    let est = dixmier_estimate_with(a.model(), &psi_fn, &proc, &options(args))?;
    write_sequence_curve(curve, &prefunctional(a.model(), &psi_fn)?, args.horizon)?;
    let mut record = RunRecord::new(
        "trace",
        json!({ "seq": args.seq.to_string(), "psi": args.psi.to_string(), "band_tol": args.band_tol }),
        serde_json::to_value(&est)?,
    )
    .horizon(args.horizon)
    .procedure(proc.label());
    if est.band.widened_to_value {
        record = record.diagnostic("band widened to contain the estimate");
    }
    if (est.criterion - 1.0).abs() > 0.1 {
        record = record.diagnostic(format!(
            "additivity criterion is {:.4}; the functional is not expected to be additive for this psi",
            est.criterion
        ));
    }
    Ok(record)
}

fn mu(matrix: Option<String>, seq: Option<ModelSpec>, n: usize, curve: &CurveArg) -> Result<RunRecord> {
    if let Some(spec) = matrix {
        let m = load_matrix(&spec)?;
        let spectrum = singular_values(&m)?;
        let points: Vec<(f64, f64)> = spectrum
            .singular_values
            .iter()
            .enumerate()
            .map(|(k, &s)| (k as f64, s))
            .collect();
        write_points(curve, &points)?;
        return Ok(RunRecord::new(
            "mu",
            json!({ "matrix": spec }),
            json!({ "dim": spectrum.dim(), "singular_values": spectrum.singular_values, "hermitian_positive": spectrum.hermitian_positive }),
        ));
    }
    let spec = seq.expect("clap requires --matrix or --seq");
    let mu = rearranged(&spec, n)?;
    write_sequence_curve(curve, mu.model(), n)?;
    let mut result = json!({ "length": n, "head": mu.to_vec(n.min(8))? });
    if n <= MAX_LISTED {
        result["values"] = json!(mu.to_vec(n)?);
    }
    Ok(RunRecord::new("mu", json!({ "seq": spec.to_string(), "n": n }), result).horizon(n))
}

fn submaj(b: &ModelSpec, a: &ModelSpec, n: usize, curve: &CurveArg) -> Result<RunRecord> {
    let (bs, as_) = (rearranged(b, n)?, rearranged(a, n)?);
    let report = check_submajorized(&bs, &as_, n)?;
    let points: Vec<(f64, f64)> = report.slack.iter().enumerate().map(|(k, &s)| (k as f64, s)).collect();
    write_points(curve, &points)?;
    let mut result = json!({
        "holds": report.holds,
        "first_violation": report.first_violation,
        "min_slack": report.min_slack,
        "min_relative_slack": report.min_relative_slack,
    });
    if n <= MAX_LISTED {
        result["slack"] = json!(report.slack);
    }
    Ok(RunRecord::new("submaj", json!({ "b": b.to_string(), "a": a.to_string(), "n": n }), result).horizon(n))
}

fn wedge_cmd(a: &ModelSpec, b: &ModelSpec, n: usize, curve: &CurveArg) -> Result<RunRecord> {
    let (as_, bs) = (rearranged(a, n)?, rearranged(b, n)?);
    let w = wedge(&as_, &bs, n)?;
    let values = w.to_vec(n)?;
    write_sequence_curve(curve, w.model(), n)?;
    let total = values.iter().sum::<f64>();
    let mut result = json!({ "length": n, "sum": total, "head": &values[..n.min(8)] });
    if n <= MAX_LISTED {
        result["values"] = json!(values);
    }
    Ok(RunRecord::new("wedge", json!({ "a": a.to_string(), "b": b.to_string(), "n": n }), result).horizon(n))
}

fn decompose(b: &ModelSpec, a1: &ModelSpec, a2: &ModelSpec, n: usize) -> Result<RunRecord> {
    let cert = decompose_submajorized(&rearranged(b, n)?, &rearranged(a1, n)?, &rearranged(a2, n)?, n)?;
    Ok(RunRecord::new(
        "decompose",
        json!({ "b": b.to_string(), "a1": a1.to_string(), "a2": a2.to_string(), "n": n }),
        serde_json::to_value(&cert)?,
    )
    .horizon(n))
}

/// Decreasing rearrangement of the first `n` entries. Files may hold
/// arbitrary nonnegative values; model sequences are already decreasing.
fn rearranged(spec: &ModelSpec, n: usize) -> singtrace_core::Result<DecreasingSequence> {
    match spec {
        ModelSpec::File(path) => {
            let raw = SequenceModel::from_vec(read_sequence_csv(path)?)?;
            decreasing_rearrangement(&raw.padded(n.max(raw.horizon()))?, n)
        }
        other => model_sequence(other)?.truncate(n),
    }
}

fn load_matrix(spec: &str) -> singtrace_core::Result<DenseMatrix> {
    let path = Path::new(spec.strip_prefix("file:").unwrap_or(spec));
    DenseMatrix::from_real_rows(&read_matrix_csv(path)?)
}

/// Log-spaced sample of `0..horizon`, always including both ends.
fn log_grid(horizon: usize, points: usize) -> Vec<usize> {
    if horizon <= points.max(2) {
        return (0..horizon).collect();
    }
    let top = (horizon as f64).ln();
    let mut grid: Vec<usize> = (0..points)
        .map(|i| ((top * i as f64 / (points - 1) as f64).exp().round() as usize).saturating_sub(1))
        .collect();
    grid.push(horizon - 1);
    grid.dedup();
    grid
}

fn write_sequence_curve(curve: &CurveArg, x: &SequenceModel, horizon: usize) -> singtrace_core::Result<()> {
    let Some(path) = &curve.curve else {
        return Ok(());
    };
    let grid = log_grid(horizon.min(x.horizon()), curve.curve_points);
    let mut points = Vec::with_capacity(grid.len());
    let mut stream = x.iter().enumerate();
    for &k in &grid {
        let (_, v) = stream
            .by_ref()
            .find(|&(i, _)| i == k)
            .ok_or(Error::Horizon { requested: k, horizon: x.horizon() })?;
        points.push((k as f64, v));
    }
    write_curve_csv(path, &points)
}

fn write_points(curve: &CurveArg, points: &[(f64, f64)]) -> singtrace_core::Result<()> {
    match &curve.curve {
        Some(path) => write_curve_csv(path, points),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_covers_both_ends() {
        let g = log_grid(1_000_000, 100);
        assert_eq!(g[0], 0);
        assert_eq!(*g.last().unwrap(), 999_999);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(log_grid(5, 100), vec![0, 1, 2, 3, 4]);
    }
}
