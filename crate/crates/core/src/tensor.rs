//! Dense complex linear algebra on multipartite operators.
//!
//! Subsystems are laid out in Kronecker order: site 0 is the most significant
//! digit of a basis index, so `kron(a, b)` places `a` on site 0 and `b` on site 1.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Max allowed |m_ij - conj(m_ji)|.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Max allowed |tr(rho) - 1|.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-9;
/// Imaginary residue of an expectation value that is silently discarded.
pub const IMAG_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Places `op` on `site` and identities everywhere else.
pub fn embed(op: &ComplexMatrix, site: usize, dims: &[usize]) -> Result<ComplexMatrix> {
    if site >= dims.len() {
        return Err(Error::SiteOutOfRange {
            site,
            n_sites: dims.len(),
        });
    }
    if !op.is_square() || op.nrows() != dims[site] {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, site {site} has dimension {}",
            op.nrows(),
            op.ncols(),
            dims[site]
        )));
    }
    let before: usize = dims[..site].iter().product();
    let after: usize = dims[site + 1..].iter().product();
    Ok(kron(&kron(&identity(before), op), &identity(after)))
}

pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn ensure_hermitian(m: &ComplexMatrix) -> Result<()> {
    let deviation = hermiticity_deviation(m);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let herm = (m + m.adjoint()).scale(0.5);
    let mut values: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// tr(a * b) without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Diagnostics gathered while validating a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
}

/// A validated mixed state over subsystems of dimensions `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

/// Checks every density-matrix invariant and returns the validated state.
pub fn validate_density(matrix: ComplexMatrix, dims: &[usize]) -> Result<DensityMatrix> {
    validate_with_report(matrix, dims).map(|(rho, _)| rho)
}

/// As [`validate_density`], also returning the measured deviations.
pub fn validate_with_report(
    matrix: ComplexMatrix,
    dims: &[usize],
) -> Result<(DensityMatrix, ValidationReport)> {
    check_dims(dims)?;
    let total: usize = dims.iter().product();
    if !matrix.is_square() || matrix.nrows() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, dims {:?} need {total}x{total}",
            matrix.nrows(),
            matrix.ncols(),
            dims
        )));
    }
    if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let hermiticity_deviation = hermiticity_deviation(&matrix);
    if hermiticity_deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            deviation: hermiticity_deviation,
        });
    }
    let trace = matrix.trace().re;
    let trace_deviation = (trace - 1.0).abs();
    if trace_deviation > TRACE_TOL {
        return Err(Error::TraceNotOne {
            trace,
            deviation: trace_deviation,
        });
    }
    let min_eigenvalue = hermitian_eigenvalues(&matrix)[0];
    if min_eigenvalue < PSD_TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let report = ValidationReport {
        hermiticity_deviation,
        trace_deviation,
        min_eigenvalue,
    };
    Ok((
        DensityMatrix {
            dims: dims.to_vec(),
            matrix,
        },
        report,
    ))
}

pub(crate) fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::InvalidParameter("no subsystems".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidParameter(format!(
            "subsystem dimension {d} < 2"
        )));
    }
    Ok(())
}

fn check_subset(subset: &[usize], n_sites: usize) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&site) = sorted.iter().find(|&&s| s >= n_sites) {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    Ok(sorted)
}

/// Row-major strides of a Kronecker layout (site 0 most significant).
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * dims[i + 1];
    }
    out
}

/// Full-space basis index for every (kept index, traced index) pair.
pub(crate) fn split_index_table(dims: &[usize], keep: &[usize]) -> (usize, usize, Vec<usize>) {
    let stride = strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
    let kept_dim: usize = keep.iter().map(|&s| dims[s]).product();
    let traced_dim: usize = traced.iter().map(|&s| dims[s]).product();

    let offsets = |sites: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &s in sites.iter().rev() {
                    off += (idx % dims[s]) * stride[s];
                    idx /= dims[s];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(keep, kept_dim);
    let traced_off = offsets(&traced, traced_dim);

    let mut table = Vec::with_capacity(kept_dim * traced_dim);
    for &k in &kept_off {
        for &t in &traced_off {
            table.push(k + t);
        }
    }
    (kept_dim, traced_dim, table)
}

impl DensityMatrix {
    /// Wraps a matrix already known to satisfy the invariants.
    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.nrows(), dims.iter().product::<usize>());
        DensityMatrix { dims, matrix }
    }

    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        let d: usize = dims.iter().product();
        Ok(Self::from_parts_unchecked(
            identity(d).scale(1.0 / d as f64),
            dims.to_vec(),
        ))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Reduced state on `keep`, in the original relative site order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = check_subset(keep, self.n_sites())?;
        if keep.len() == self.n_sites() {
            return Ok(self.clone());
        }
        let (kept_dim, traced_dim, table) = split_index_table(&self.dims, &keep);
        let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
        for a in 0..kept_dim {
            let row = &table[a * traced_dim..(a + 1) * traced_dim];
            for b in 0..kept_dim {
                let col = &table[b * traced_dim..(b + 1) * traced_dim];
                let mut acc = Complex64::new(0.0, 0.0);
                for (&i, &j) in row.iter().zip(col) {
                    acc += self.matrix[(i, j)];
                }
                out[(a, b)] = acc;
            }
        }
        let dims = keep.iter().map(|&s| self.dims[s]).collect();
        Ok(DensityMatrix::from_parts_unchecked(out, dims))
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mix(&self, weight: f64, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "cannot mix states with dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter(format!(
                "mixing weight {weight} outside [0, 1]"
            )));
        }
        let m = self.matrix.scale(weight) + other.matrix.scale(1.0 - weight);
        Ok(DensityMatrix::from_parts_unchecked(m, self.dims.clone()))
    }
}

fn check_operator(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<()> {
    if !op.is_square() || op.nrows() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, state has dimension {}",
            op.nrows(),
            op.ncols(),
            rho.dim()
        )));
    }
    ensure_hermitian(op)
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() >= IMAG_TOL {
        return Err(Error::InvalidParameter(format!(
            "expectation value has imaginary part {:.3e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// tr(op * rho).
pub fn expectation(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    check_operator(op, rho)?;
    real_part(trace_of_product(op, rho.matrix()))
}

/// tr(op^2 rho) - tr(op rho)^2, clamped to zero against rounding.
pub fn variance(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    check_operator(op, rho)?;
    let mean = real_part(trace_of_product(op, rho.matrix()))?;
    let op_rho = op * rho.matrix();
    let second = real_part(trace_of_product(op, &op_rho))?;
    let v = second - mean * mean;
    Ok(if (PSD_TOL..0.0).contains(&v) { 0.0 } else { v })
}
