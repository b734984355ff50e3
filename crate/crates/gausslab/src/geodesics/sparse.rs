//! Sparse averages Σ_{N(n) ≤ x} L(s, n²−4) of the Zagier series.

use super::exclusion;
use crate::error::{Error, Result};
use crate::gaussian::{enumerate, GaussianInt, NormRange};
use crate::lfunctions::{SeriesParams, ZagierBatch};
use crate::numeric::KahanComplex;
use crate::par::{self, Exec};
use num_complex::Complex64;
use serde::Serialize;

type G = GaussianInt;

/// Default truncation of each Zagier series in the average.
pub const SPARSE_CUTOFF: u64 = 4096;

/// Σ over n with N(n) ≤ x (the Ψ filter applied) of L(s, n²−4), 1 < Re s ≤ 2.
pub fn sparse_average(x: f64, s: Complex64) -> Result<Complex64> {
    let batch = ZagierBatch::new(SeriesParams::sharp(SPARSE_CUTOFF, 1e-3)?)?;
    sparse_average_with(&batch, x, s)
}

pub fn sparse_average_with(batch: &ZagierBatch, x: f64, s: Complex64) -> Result<Complex64> {
    if !(s.re > 1.0 && s.re <= 2.0) {
        return Err(Error::Unsupported(format!("sparse averages are computed for 1 < Re s ≤ 2, got {s}")));
    }
    if x < 1.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ns: Vec<G> = enumerate(NormRange::new(0, x.floor() as u64)?)
        .into_iter()
        .filter(|&n| exclusion(n).is_none())
        .collect();
    let vals = par::try_map(Exec::default(), &ns, |&n| {
        let delta = n.checked_mul(n)?.checked_sub(G::from_int(4))?;
        batch
            .zagier_L(delta, s)
            .map(|v| v.value)
            .map_err(|e| Error::Consistency(format!("L(s, n²−4) at n = {n}: {e}")))
    })?;
    Ok(vals.into_iter().collect::<KahanComplex>().value())
}

/// Fit of x·(α₀ + α₁·log x) to sampled real parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SparseShape {
    pub alpha0: f64,
    pub alpha1: f64,
    /// max |value − fit| / |value| over the samples
    pub max_rel_residual: f64,
}

pub fn fit_sparse_shape(samples: &[(f64, f64)]) -> Result<SparseShape> {
    if samples.len() < 2 {
        return Err(Error::domain("need at least two samples"));
    }
    // value/x = α₀ + α₁ log x, weighted so that relative residuals count
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1 / s.0).collect();
    let (a0, a1, _) = crate::numeric::linear_fit(&xs, &ys).ok_or_else(|| Error::Fit("degenerate x grid".into()))?;
    let max_rel_residual = samples
        .iter()
        .map(|&(x, v)| (v - x * (a0 + a1 * x.ln())).abs() / v.abs())
        .fold(0.0, f64::max);
    Ok(SparseShape { alpha0: a0, alpha1: a1, max_rel_residual })
}
