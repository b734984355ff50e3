//! Spectral exponential sums over ingested spectral parameters t_j, and the
//! test functions used to localize them.
//!
//! Eigenvalue files are UTF-8 text with one decimal t_j per line; lines
//! starting with '#' are comments and blank lines are ignored.

use crate::error::{Error, Result};
use crate::numeric::{KahanComplex, KahanSum};
use crate::par::{self, Exec};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;

/// Catalan's constant.
pub const CATALAN: f64 = 0.915_965_594_177_219;

/// vol(Γ\H³) as it enters the Weyl constant used here: ζ_{Q(i)}(2)/(4π²) = G/24.
pub const VOLUME: f64 = CATALAN / 24.0;

/// Humbert's volume |d_K|^{3/2}·ζ_K(2)/(4π²) with d_K = −4, i.e. G/3.
pub const VOLUME_HUMBERT: f64 = CATALAN / 3.0;

/// VOLUME/6 = G/144.
pub const WEYL_CONSTANT: f64 = VOLUME / 6.0;

/// Lower bound t ≥ √(π²−1) implied by λ = 1 + t² ≥ π².
pub fn t_floor() -> f64 {
    (PI * PI - 1.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    t_values: Vec<f64>,
    pub source_label: String,
    /// Entries below √(π²−1); kept, but reported.
    pub warnings: Vec<String>,
}

impl Spectrum {
    /// Sorts the values and checks positivity. Multiplicities are kept.
    pub fn new(mut t_values: Vec<f64>, source_label: impl Into<String>) -> Result<Self> {
        if t_values.is_empty() {
            return Err(Error::domain("empty spectrum"));
        }
        if let Some(bad) = t_values.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::domain(format!("spectral parameter {bad} is not a positive real")));
        }
        t_values.sort_by(f64::total_cmp);
        let floor = t_floor();
        let low = t_values.iter().filter(|&&t| t < floor).count();
        let warnings = if low > 0 {
            vec![format!("{low} values below √(π²−1) ≈ {floor:.4}")]
        } else {
            Vec::new()
        };
        Ok(Self { t_values, source_label: source_label.into(), warnings })
    }

    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }

    pub fn len(&self) -> usize {
        self.t_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_values.is_empty()
    }

    /// #{t_j ≤ T}.
    pub fn count_up_to(&self, t: f64) -> usize {
        self.t_values.partition_point(|&x| x <= t)
    }
}

/// Parse the eigenvalue file format.
pub fn parse_spectrum(text: &str, label: &str) -> Result<Spectrum> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let l = line.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let v: f64 = l.parse().map_err(|e| Error::Parse { line: Some(i + 1), msg: format!("{l:?}: {e}") })?;
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Parse { line: Some(i + 1), msg: format!("{l:?} is not a positive real") });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Parse { line: None, msg: format!("{label}: no spectral parameters") });
    }
    Spectrum::new(values, label)
}

pub fn load_spectrum(path: &Path) -> Result<Spectrum> {
    // an unreadable file is an I/O failure, not malformed content
    let text = std::fs::read_to_string(path).map_err(|e| Error::Resource(format!("{}: {e}", path.display())))?;
    parse_spectrum(&text, &path.display().to_string())
}

const CHUNK: usize = 1 << 12;

fn chunked_sum(ts: &[f64], f: impl Fn(f64) -> Complex64 + Sync + Send) -> Complex64 {
    let chunks: Vec<&[f64]> = ts.chunks(CHUNK).collect();
    let parts = par::map(Exec::default(), &chunks, |c| c.iter().map(|&t| f(t)).collect::<KahanComplex>().value());
    parts.into_iter().collect::<KahanComplex>().value()
}

/// Σ_{t_j ≤ T} X^{i t_j}.
pub fn spectral_exp_sum(spec: &Spectrum, t: f64, x: f64) -> Result<Complex64> {
    if !(t > 0.0) || !(x > 0.0) {
        return Err(Error::domain("need T > 0 and X > 0"));
    }
    let lx = x.ln();
    let ts = &spec.t_values[..spec.count_up_to(t)];
    Ok(chunked_sum(ts, |tj| Complex64::from_polar(1.0, tj * lx)))
}

/// Weights beyond t_j = 20·T are below e^{−20} and are dropped.
pub const WEIGHT_CUTOFF: f64 = 20.0;

/// Σ_j X^{i t_j}·e^{−t_j/T}, over t_j ≤ 20·T.
pub fn weighted_spectral_sum(spec: &Spectrum, t: f64, x: f64) -> Result<Complex64> {
    if !(t > 0.0) || !(x > 0.0) {
        return Err(Error::domain("need T > 0 and X > 0"));
    }
    let lx = x.ln();
    let ts = &spec.t_values[..spec.count_up_to(WEIGHT_CUTOFF * t)];
    Ok(chunked_sum(ts, |tj| Complex64::from_polar((-tj / t).exp(), tj * lx)))
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestFunctionParams {
    pub T: f64,
    pub X: f64,
    pub beta: Complex64,
    pub a: f64,
    pub b: f64,
}

impl TestFunctionParams {
    /// |i·cosh β − (−a + ib)| / |−a + ib|.
    pub fn invariant_residual(&self) -> f64 {
        let lhs = Complex64::i() * self.beta.cosh();
        let rhs = Complex64::new(-self.a, self.b);
        (lhs - rhs).norm() / rhs.norm()
    }
}

/// 2β = log X + i/T, a = sinh(log √X)·sin(1/(2T)), b = cosh(log √X)·cos(1/(2T)).
#[allow(non_snake_case)]
pub fn test_function_params(T: f64, X: f64) -> Result<TestFunctionParams> {
    if !(T >= 2.0 && X >= 2.0 && T.is_finite() && X.is_finite()) {
        return Err(Error::domain(format!("need T, X ≥ 2, got T = {T}, X = {X}")));
    }
    let u = 0.5 * X.ln();
    let v = 0.5 / T;
    let p = TestFunctionParams { T, X, beta: Complex64::new(u, v), a: u.sinh() * v.sin(), b: u.cosh() * v.cos() };
    debug_assert!(p.invariant_residual() < 1e-12);
    Ok(p)
}

/// Above this t the sinh ratio is evaluated in its cancelled form.
pub const CANCEL_ABOVE: f64 = 30.0;

/// φ̆(t) = sinh((π+2iβ)t)/sinh(πt) for t > 0.
///
/// With z = π + 2iβ the ratio equals e^{2iβt}·(1 − e^{−2zt})/(1 − e^{−2πt}),
/// and e^{2iβt} = X^{it}e^{−t/T}; this form is used above t = 30, where the
/// direct quotient would overflow long before its value does.
pub fn breve_phi_closed(t: f64, p: &TestFunctionParams) -> Result<Complex64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    let two_i_beta = Complex64::i() * p.beta * 2.0;
    let z = Complex64::new(PI, 0.0) + two_i_beta;
    if t <= CANCEL_ABOVE {
        return Ok((z * t).sinh() / (PI * t).sinh());
    }
    let lead = (two_i_beta * t).exp();
    let num = Complex64::new(1.0, 0.0) - (-z * (2.0 * t)).exp();
    let den = 1.0 - (-2.0 * PI * t).exp();
    Ok(lead * num / den)
}

/// X^{it}e^{−t/T}, the main term of φ̆.
pub fn breve_phi_main(t: f64, p: &TestFunctionParams) -> Complex64 {
    Complex64::from_polar((-t / p.T).exp(), t * p.X.ln())
}

/// φ̆(t) − X^{it}e^{−t/T}, computed from the identity
/// φ̆(t) − e^{2iβt} = (e^{2iβt} − e^{−2iβt})·e^{−2πt}/(1 − e^{−2πt}).
///
/// The remainder is of size e^{−2πt}, far below the rounding error of
/// φ̆(t) itself once t passes about 6, so subtracting the two computed values
/// is useless there. This form keeps full relative precision for every t > 0.
pub fn breve_phi_remainder(t: f64, p: &TestFunctionParams) -> Result<Complex64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    let w = Complex64::i() * p.beta * (2.0 * t);
    let q = (-2.0 * PI * t).exp();
    Ok((w.exp() - (-w).exp()) * (q / -(-2.0 * PI * t).exp_m1()))
}

/// Normalized remainder |φ̆(t) − X^{it}e^{−t/T}|·e^{πt}.
pub fn heckes_constant(t: f64, p: &TestFunctionParams) -> Result<f64> {
    Ok(breve_phi_remainder(t, p)?.norm() * (PI * t).exp())
}

/// #{t_j ≤ T}/T³.
pub fn weyl_ratio(spec: &Spectrum, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("T must be positive"));
    }
    Ok(spec.count_up_to(t) as f64 / (t * t * t))
}

/// t_j = (6π²·j/vol)^{1/3}, j = 1..=count: the counting function is then
/// ⌊vol·T³/(6π²)⌋.
pub fn synthetic_weyl(vol: f64, count: usize) -> Result<Spectrum> {
    if !(vol > 0.0) || count == 0 {
        return Err(Error::domain("need vol > 0 and count ≥ 1"));
    }
    let v = (1..=count).map(|j| (6.0 * PI * PI * j as f64 / vol).cbrt()).collect();
    Spectrum::new(v, format!("synthetic Weyl, vol = {vol}"))
}

/// t_j = t0 + j·h, j = 0..count.
pub fn synthetic_progression(t0: f64, h: f64, count: usize) -> Result<Spectrum> {
    if !(t0 > 0.0 && h > 0.0) || count == 0 {
        return Err(Error::domain("need t0, h > 0 and count ≥ 1"));
    }
    Spectrum::new((0..count).map(|j| t0 + j as f64 * h).collect(), format!("progression t0 = {t0}, h = {h}"))
}

/// Σ_{j<n} e^{iθ(t0 + jh)} in closed form.
pub fn progression_sum_closed(t0: f64, h: f64, n: usize, theta: f64) -> Complex64 {
    let w = Complex64::from_polar(1.0, theta * h);
    let start = Complex64::from_polar(1.0, theta * t0);
    if (w - 1.0).norm() < 1e-14 {
        return start * n as f64;
    }
    start * (Complex64::new(1.0, 0.0) - w.powu(n as u32)) / (Complex64::new(1.0, 0.0) - w)
}

/// Σ e^{−t_j/T} (the weighted sum at X = 1), for checks.
pub fn weight_mass(spec: &Spectrum, t: f64) -> f64 {
    spec.t_values[..spec.count_up_to(WEIGHT_CUTOFF * t)].iter().map(|&tj| (-tj / t).exp()).collect::<KahanSum>().value()
}
