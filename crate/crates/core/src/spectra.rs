//! Singular values of small dense matrices.
//!
//! Matrices are a verification surface for the sequence calculus: they let
//! tests check operator-level statements (the submajorization sandwich for
//! `A + B`, unitary invariance) that the diagonal models cannot exercise.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::majorization::{check_submajorized_tol, SubmajorizationReport};
use crate::sequences::{dilate_half, DecreasingSequence, SequenceModel};

pub const MAX_DIMENSION: usize = 512;

const JACOBI_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 80;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 || n > MAX_DIMENSION {
            return Err(Error::arg(format!(
                "matrix dimension must lie in 1..={MAX_DIMENSION}, got {n}"
            )));
        }
        if data.len() != n * n {
            return Err(Error::arg(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::arg(format!(
                "non-finite entry at row {}, column {}",
                k / n,
                k % n
            )));
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().position(|row| row.len() != n) {
            return Err(Error::arg(format!(
                "row {r} has {} entries, expected {n}",
                rows[r].len()
            )));
        }
        let data = rows
            .iter()
            .flatten()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        Self::new(n, data)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::new(n, data)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let n = self.n;
        DenseMatrix {
            n,
            data: (0..n * n).map(|k| self.at(k % n, k / n).conj()).collect(),
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n != other.n {
            return Err(Error::arg("dimension mismatch in matrix sum"));
        }
        Ok(DenseMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n != other.n {
            return Err(Error::arg("dimension mismatch in matrix product"));
        }
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.at(k, j);
                }
            }
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.frobenius_norm().max(f64::MIN_POSITIVE);
        (0..self.n).all(|i| (i..self.n).all(|j| (self.at(i, j) - self.at(j, i).conj()).norm() <= tol * scale))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }
}

/// Singular values plus a positivity flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralData {
    pub singular_values: Vec<f64>,
    /// The source matrix was Hermitian with nonnegative spectrum.
    pub hermitian_positive: bool,
}

impl SpectralData {
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::arg("singular values must be finite and nonnegative"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(SpectralData {
            singular_values: values,
            hermitian_positive: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.singular_values.len()
    }

    /// `μ(k)` for `k < horizon`, zero beyond the dimension.
    pub fn mu(&self, horizon: usize) -> Result<DecreasingSequence> {
        let base = SequenceModel::from_vec(self.singular_values.clone())?;
        Ok(DecreasingSequence::new_unchecked(base.padded(horizon)?))
    }
}

/// Eigenvalues of `|A|` in nonincreasing order (one-sided Jacobi).
pub fn singular_values(a: &DenseMatrix) -> Result<SpectralData> {
    let n = a.n;
    // columns of A, each stored contiguously
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| a.at(i, j)).collect()).collect();
    let fro2: f64 = a.data.iter().map(|z| z.norm_sqr()).sum();

    if fro2 > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let mut off2 = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    let (alpha, beta, gamma) = column_gram(&cols[p], &cols[q]);
                    let g = gamma.norm();
                    off2 += 2.0 * g * g;
                    if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotate(&mut cols, p, q, alpha, beta, gamma);
                }
            }
            if off2.sqrt() < JACOBI_TOLERANCE * fro2 {
                break;
            }
        }
    }

    let mut values: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    values.sort_by(|x, y| y.total_cmp(x));

    let hermitian_positive = a.is_hermitian(1e-12) && {
        let sum: f64 = values.iter().sum();
        (a.trace().re - sum).abs() <= 1e-10 * sum.max(f64::MIN_POSITIVE)
    };
    Ok(SpectralData {
        singular_values: values,
        hermitian_positive,
    })
}

fn column_gram(p: &[Complex64], q: &[Complex64]) -> (f64, f64, Complex64) {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = Complex64::new(0.0, 0.0);
    for (x, y) in p.iter().zip(q) {
        alpha += x.norm_sqr();
        beta += y.norm_sqr();
        gamma += x.conj() * y;
    }
    (alpha, beta, gamma)
}

// Orthogonalize columns p and q. The phase of <p,q> is absorbed into q so
// the remaining rotation is real.
fn rotate(cols: &mut [Vec<Complex64>], p: usize, q: usize, alpha: f64, beta: f64, gamma: Complex64) {
    let g = gamma.norm();
    let phase = gamma / g;
    let zeta = (beta - alpha) / (2.0 * g);
    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
    let t = if zeta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = c * t;
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yq = *y * phase.conj();
        let xp = *x;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

/// `d(s) = #{k : μ(k) > s}`.
pub fn distribution_function(spectrum: &SpectralData, s: f64) -> Result<usize> {
    if !(s >= 0.0) {
        return Err(Error::arg(format!("distribution argument must be nonnegative, got {s}")));
    }
    // values are sorted nonincreasingly
    Ok(spectrum.singular_values.partition_point(|&v| v > s))
}

/// Singular values of `A ⊕ B`.
pub fn direct_sum(a: &SpectralData, b: &SpectralData) -> SpectralData {
    let mut merged = Vec::with_capacity(a.dim() + b.dim());
    let (mut i, mut j) = (0, 0);
    let (x, y) = (&a.singular_values, &b.singular_values);
    while i < x.len() || j < y.len() {
        if j == y.len() || (i < x.len() && x[i] >= y[j]) {
            merged.push(x[i]);
            i += 1;
        } else {
            merged.push(y[j]);
            j += 1;
        }
    }
    SpectralData {
        singular_values: merged,
        hermitian_positive: a.hermitian_positive && b.hermitian_positive,
    }
}

/// `A^{⊕n}`.
pub fn direct_power(a: &SpectralData, n: usize) -> Result<SpectralData> {
    if n == 0 {
        return Err(Error::arg("direct power must be at least 1"));
    }
    let mut values = Vec::with_capacity(a.dim() * n);
    for &v in &a.singular_values {
        values.extend(std::iter::repeat_n(v, n));
    }
    Ok(SpectralData {
        singular_values: values,
        hermitian_positive: a.hermitian_positive,
    })
}

/// Both halves of `μ(A+B) ≺≺ μ(A)+μ(B) ≺≺ 2σ_{1/2}μ(A+B)` for a pair of
/// positive matrices.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub lower: SubmajorizationReport,
    pub upper: SubmajorizationReport,
    /// Smallest relative slack over both chains (negative means violated).
    pub min_relative_slack: f64,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower.holds && self.upper.holds
    }
}

pub fn submajorization_sandwich(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> Result<SandwichReport> {
    let n = a.dim();
    let sum = a.add(b)?;
    let mu_sum = singular_values(&sum)?;
    let mu_a = singular_values(a)?;
    let mu_b = singular_values(b)?;
    let horizon = 2 * n;
    let mu_sum_seq = mu_sum.mu(horizon)?;
    let split = DecreasingSequence::new_unchecked(
        mu_a.mu(horizon)?.model().add(mu_b.mu(horizon)?.model()),
    );
    let doubled = DecreasingSequence::new_unchecked(dilate_half(mu_sum.mu(2 * horizon)?.model())?.scale(2.0));
    let lower = check_submajorized_tol(&mu_sum_seq, &split, n, tol)?;
    let upper = check_submajorized_tol(&split, &doubled, n, tol)?;
    let min_relative_slack = lower.min_relative_slack.min(upper.min_relative_slack);
    Ok(SandwichReport {
        lower,
        upper,
        min_relative_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn real(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn diagonal_singular_values() {
        let s = singular_values(&DenseMatrix::diagonal(&[1.0, -3.0, 2.0]).unwrap()).unwrap();
        assert_eq!(s.singular_values, vec![3.0, 2.0, 1.0]);
        assert!(!s.hermitian_positive);
        let p = singular_values(&DenseMatrix::diagonal(&[1.0, 3.0, 2.0]).unwrap()).unwrap();
        assert!(p.hermitian_positive);
    }

    #[test]
    fn zero_matrix() {
        let s = singular_values(&DenseMatrix::diagonal(&[0.0; 4]).unwrap()).unwrap();
        assert_eq!(s.singular_values, vec![0.0; 4]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(DenseMatrix::from_real_rows(&[vec![1.0, f64::NAN], vec![0.0, 1.0]]).is_err());
        assert!(DenseMatrix::from_real_rows(&[vec![1.0, 2.0], vec![0.0]]).is_err());
        assert!(DenseMatrix::new(0, vec![]).is_err());
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[1,1],[0,1]] has singular values (1±√5)/2 in absolute value
        let s = singular_values(&real(&[&[1.0, 1.0], &[0.0, 1.0]])).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((s.singular_values[0] - phi).abs() < 1e-14);
        assert!((s.singular_values[1] - 1.0 / phi).abs() < 1e-14);
    }

    #[test]
    fn distribution_counts() {
        let s = SpectralData::from_values(vec![3.0, 2.0, 1.0]).unwrap();
        assert_eq!(distribution_function(&s, 1.5).unwrap(), 2);
        assert_eq!(distribution_function(&s, 3.0).unwrap(), 0);
        assert_eq!(distribution_function(&s, 7.0).unwrap(), 0);
        assert_eq!(distribution_function(&s, 0.0).unwrap(), 3);
        assert!(distribution_function(&s, -1.0).is_err());
    }

    #[test]
    fn distribution_round_trip() {
        // μ(t) = inf{s ≥ 0 : d(s) ≤ t}; the infimum is attained on the grid
        // of distinct singular values together with 0.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let len = rng.gen_range(1..20);
            let vals: Vec<f64> = (0..len).map(|_| (rng.gen_range(0..6) as f64) * 0.5).collect();
            let s = SpectralData::from_values(vals).unwrap();
            let mut grid = s.singular_values.clone();
            grid.push(0.0);
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            for t in 0..len + 3 {
                let inf = grid
                    .iter()
                    .copied()
                    .find(|&g| distribution_function(&s, g).unwrap() <= t)
                    .unwrap();
                let expected = s.singular_values.get(t).copied().unwrap_or(0.0);
                assert_eq!(inf, expected, "t={t} spectrum={:?}", s.singular_values);
            }
            for w in grid.windows(2) {
                assert!(distribution_function(&s, w[0]).unwrap() >= distribution_function(&s, w[1]).unwrap());
            }
        }
    }

    #[test]
    fn direct_sums() {
        let a = SpectralData::from_values(vec![3.0, 1.0]).unwrap();
        let b = SpectralData::from_values(vec![2.0, 0.0]).unwrap();
        assert_eq!(direct_sum(&a, &b).singular_values, vec![3.0, 2.0, 1.0, 0.0]);
        let z = SpectralData::from_values(vec![0.0]).unwrap();
        assert_eq!(direct_sum(&a, &z).singular_values, vec![3.0, 1.0, 0.0]);
    }

    #[test]
    fn direct_power_is_dilation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = DenseMatrix::from_fn(5, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
        let s = singular_values(&m).unwrap();
        let p = direct_power(&s, 3).unwrap();
        let d = s.mu(5).unwrap().dilate_up(3).unwrap();
        assert_eq!(p.singular_values, d.to_vec(15).unwrap());
    }
}
