//! ζ_{Q(i)}(s), quadratic L-functions L(s, χ_D), the Dirichlet polynomial
//! T_ℓ^{(D)}(s) and the Zagier series L(s, δ).
//!
//! Normalization: series over ideals sum over canonical generators (one per
//! ideal); series over elements count all four associates and are exactly 4
//! times larger. `dirichlet_L` is an ideal series. `zagier_L` is an element
//! series, so its leading coefficient is 4·λ_1 = 4. [`szmidt_check`]
//! divides the Zagier side by 4 before comparing.
//!
//! Every evaluator has a validity half-plane and refuses to evaluate outside
//! it; there is no analytic continuation.

mod engine;

pub use engine::{L1Engine, L1_SCALE_CAP, L1_SCALE_MIN, L1_TOLERANCE};

use crate::characters::{eval_with, euler_symbol, DiscriminantDecomposition, QuadraticCharacter};
use crate::error::{Error, Result};
use crate::gaussian::{canon, divisors, factor, mobius, GaussianInt, IdealTable};
use crate::kloosterman::lambda_closed_form;
use crate::numeric::KahanComplex;
use crate::par::{self, Exec};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

type G = GaussianInt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    Element,
    Ideal,
}

/// Truncation and smoothing of a Dirichlet series.
///
/// With a smoothing scale X the terms carry the weight exp(−N(n)/X) and the
/// evaluator also runs at 2X (reading norms up to twice the cutoff), returns
/// the Richardson combination 2·S(2X) − S(X), which removes the O(1/X) bias,
/// and reports |S(2X) − S(X)| as part of the error estimate. Without a scale
/// the sum is a sharp truncation at `cutoff_norm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesParams {
    pub cutoff_norm: u64,
    pub smoothing_scale: Option<f64>,
    pub tail_tolerance: f64,
}

impl SeriesParams {
    pub fn new(cutoff_norm: u64, smoothing_scale: Option<f64>, tail_tolerance: f64) -> Result<Self> {
        let p = Self { cutoff_norm, smoothing_scale, tail_tolerance };
        p.validate()?;
        Ok(p)
    }

    /// Sharp truncation at `cutoff_norm`.
    pub fn sharp(cutoff_norm: u64, tail_tolerance: f64) -> Result<Self> {
        Self::new(cutoff_norm, None, tail_tolerance)
    }

    /// Smoothing at scale X with the smallest admissible cutoff.
    pub fn smoothed(scale: f64, tail_tolerance: f64) -> Result<Self> {
        Self::new(smoothed_cutoff(scale, tail_tolerance)?, Some(scale), tail_tolerance)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cutoff_norm == 0 {
            return Err(Error::domain("cutoff_norm must be positive"));
        }
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return Err(Error::domain("tail_tolerance must lie in (0, 1)"));
        }
        if let Some(x) = self.smoothing_scale {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::domain("smoothing_scale must be positive"));
            }
            let need = 4.0 * x * (1.0 / self.tail_tolerance).ln();
            if (self.cutoff_norm as f64) < need {
                return Err(Error::domain(format!(
                    "cutoff {} below 4·X·log(1/tol) = {need:.0}",
                    self.cutoff_norm
                )));
            }
        }
        Ok(())
    }

    /// Largest norm any evaluation with these parameters reads.
    pub fn reach(&self) -> u64 {
        if self.smoothing_scale.is_some() {
            2 * self.cutoff_norm
        } else {
            self.cutoff_norm
        }
    }

    /// Same parameters with the cutoff (and the scale, if any) doubled.
    pub fn doubled(&self) -> Self {
        Self {
            cutoff_norm: 2 * self.cutoff_norm,
            smoothing_scale: self.smoothing_scale.map(|x| 2.0 * x),
            tail_tolerance: self.tail_tolerance,
        }
    }
}

/// ⌈4·X·log(1/tol)⌉.
pub fn smoothed_cutoff(scale: f64, tol: f64) -> Result<u64> {
    if !(scale > 0.0) || !(tol > 0.0 && tol < 1.0) {
        return Err(Error::domain("need X > 0 and 0 < tol < 1"));
    }
    Ok((4.0 * scale * (1.0 / tol).ln()).ceil() as u64)
}

/// A series value with an error estimate (tail bound plus, for smoothed
/// series, the X-versus-2X discrepancy).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LValue {
    pub value: Complex64,
    pub error: f64,
}

/// The ideal table a series with these parameters needs.
pub fn series_table(params: &SeriesParams) -> Result<IdealTable> {
    params.validate()?;
    IdealTable::new(params.reach())
}

#[inline]
fn norm_pow(n: u64, s: Complex64) -> Complex64 {
    let l = (n as f64).ln();
    if s.im == 0.0 {
        Complex64::new((-s.re * l).exp(), 0.0)
    } else {
        (-s * l).exp()
    }
}

const BLOCK: usize = 1 << 12;

/// Σ_k a_k N_k^{−s} (weighted as `params` asks) over the entries of `table`.
fn sum_series(table: &IdealTable, coeffs: &[f64], s: Complex64, params: &SeriesParams) -> Result<LValue> {
    params.validate()?;
    if params.reach() > table.bound() {
        return Err(Error::Resource(format!(
            "series reaches norm {} but the table stops at {}",
            params.reach(),
            table.bound()
        )));
    }
    let norms = table.norms();
    let n_all = table.count_up_to(params.reach()).min(coeffs.len());
    let blocks = n_all.div_ceil(BLOCK);
    let cutoff = params.cutoff_norm;
    let mean_abs = if n_all == 0 { 0.0 } else { coeffs[..n_all].iter().map(|a| a.abs()).sum::<f64>() / n_all as f64 };
    let sigma = s.re;
    match params.smoothing_scale {
        None => {
            let parts = par::map_range(Exec::default(), blocks, |b| {
                let mut acc = KahanComplex::new();
                for k in b * BLOCK..((b + 1) * BLOCK).min(n_all) {
                    if coeffs[k] != 0.0 {
                        acc.add(norm_pow(norms[k], s) * coeffs[k]);
                    }
                }
                acc.value()
            });
            let value = parts.into_iter().collect::<KahanComplex>().value();
            let c = cutoff as f64;
            let tail = if sigma > 1.0 { mean_abs * PI / 4.0 * c.powf(1.0 - sigma) / (sigma - 1.0) } else { f64::INFINITY };
            Ok(LValue { value, error: tail })
        }
        Some(x) => {
            let parts = par::map_range(Exec::default(), blocks, |b| {
                let (mut a1, mut a2) = (KahanComplex::new(), KahanComplex::new());
                for k in b * BLOCK..((b + 1) * BLOCK).min(n_all) {
                    if coeffs[k] == 0.0 {
                        continue;
                    }
                    let n = norms[k];
                    let t = norm_pow(n, s) * coeffs[k];
                    a2.add(t * (-(n as f64) / (2.0 * x)).exp());
                    if n <= cutoff {
                        a1.add(t * (-(n as f64) / x).exp());
                    }
                }
                (a1.value(), a2.value())
            });
            let s1 = parts.iter().map(|p| p.0).collect::<KahanComplex>().value();
            let s2 = parts.iter().map(|p| p.1).collect::<KahanComplex>().value();
            let c = cutoff as f64;
            let tail = mean_abs * PI / 4.0
                * (x * (-c / x).exp() * c.powf(-sigma) + 2.0 * x * (-c / x).exp() * (2.0 * c).powf(-sigma));
            Ok(LValue { value: s2 * 2.0 - s1, error: (s2 - s1).norm() + tail })
        }
    }
}

/// ζ_{Q(i)}(s) for Re s > 1.
pub fn dedekind_zeta(s: Complex64, params: &SeriesParams, normalization: Normalization) -> Result<Complex64> {
    let table = series_table(params)?;
    dedekind_zeta_in(&table, s, params, normalization)
}

pub fn dedekind_zeta_in(table: &IdealTable, s: Complex64, params: &SeriesParams, normalization: Normalization) -> Result<Complex64> {
    if s.re <= 1.0 {
        return Err(Error::domain(format!("ζ is only summed for Re s > 1, got {s}")));
    }
    let ones = vec![1.0; table.len()];
    let v = sum_series(table, &ones, s, params)?.value;
    Ok(match normalization {
        Normalization::Ideal => v,
        Normalization::Element => v * 4.0,
    })
}

/// χ(n) for every entry of `table`, as real coefficients.
pub fn character_coefficients(table: &IdealTable, gen: G, chi_two: i8) -> Vec<f64> {
    let symbols = crate::characters::PrimeSymbolTable::new(table);
    let signs = table.completely_multiplicative_sign(&symbols.values(gen, chi_two));
    signs.into_iter().map(f64::from).collect()
}

fn check_half_plane(s: Complex64, trivial: bool, params: &SeriesParams) -> Result<()> {
    if trivial {
        if s.re <= 1.0 {
            return Err(Error::Pole(format!("trivial character at s = {s}")));
        }
    } else if s.re < 1.0 || (s.re == 1.0 && params.smoothing_scale.is_none()) {
        return Err(Error::domain(format!(
            "L(s, χ) needs Re s > 1, or Re s = 1 with smoothing; got {s}"
        )));
    }
    Ok(())
}

/// L(s, χ) = Σ_𝔫 χ(𝔫) N(𝔫)^{−s} over ideals.
#[allow(non_snake_case)]
pub fn dirichlet_L(s: Complex64, chi: &QuadraticCharacter, params: &SeriesParams) -> Result<LValue> {
    let table = series_table(params)?;
    dirichlet_L_in(&table, s, chi, params)
}

#[allow(non_snake_case)]
pub fn dirichlet_L_in(table: &IdealTable, s: Complex64, chi: &QuadraticCharacter, params: &SeriesParams) -> Result<LValue> {
    check_half_plane(s, chi.is_trivial(), params)?;
    let coeffs = character_coefficients(table, chi.generator(), chi.chi_two);
    sum_series(table, &coeffs, s, params)
}

/// T_ℓ(s) = Σ_{ℓ₁ℓ₂ = ℓ} μ(ℓ₁)χ(ℓ₁)σ_{1−2s}(ℓ₂)/N(ℓ₁)^s over canonical divisors.
#[allow(non_snake_case)]
pub fn T_poly(ell: G, chi: &QuadraticCharacter, s: Complex64) -> Result<Complex64> {
    t_poly_with(ell, chi.generator(), chi.chi_two, s)
}

pub(crate) fn t_poly_with(ell: G, gen: G, chi_two: i8, s: Complex64) -> Result<Complex64> {
    if ell.is_zero() {
        return Err(Error::domain("ℓ must be nonzero"));
    }
    let ell = canon(ell)?;
    let xi = Complex64::new(1.0, 0.0) - s * 2.0;
    let mut acc = KahanComplex::new();
    for l1 in divisors(ell)? {
        let mu = mobius(l1)?;
        if mu == 0 {
            continue;
        }
        let c = eval_with(gen, chi_two, l1)?;
        if c == 0 {
            continue;
        }
        let l2 = ell.exact_div(l1)?;
        let sig = factor(l2)?.sigma_complex(xi);
        acc.add(sig * norm_pow(l1.norm() as u64, s) * f64::from(mu * c));
    }
    Ok(acc.value())
}

/// Data for the Zagier series of one discriminant δ (a nondegenerate square
/// modulo 4, so that λ_c(δ) is multiplicative in c).
#[derive(Debug)]
pub struct ZagierContext {
    pub delta: G,
    pub decomp: DiscriminantDecomposition,
    two_adic_r: u32,
    lambda_cache: RwLock<HashMap<G, i64>>,
}

impl ZagierContext {
    pub fn new(delta: G) -> Result<Self> {
        if !crate::characters::is_square_mod_four(delta) {
            return Err(Error::domain(format!("{delta} is not a square modulo 4")));
        }
        let decomp = crate::characters::fundamental_decomposition(delta)?;
        let two_adic_r = factor(decomp.ell)?.exponent_of(G::ONE_PLUS_I);
        Ok(Self { delta, decomp, two_adic_r, lambda_cache: RwLock::new(HashMap::new()) })
    }

    /// Number of cached λ values.
    pub fn cache_len(&self) -> usize {
        self.lambda_cache.read().map(|m| m.len()).unwrap_or(0)
    }

    fn local(&self, p: G, k: u32) -> Result<i64> {
        let gen = self.decomp.generator();
        let (r, chi) = if p == G::ONE_PLUS_I {
            (self.two_adic_r, self.decomp.chi_two)
        } else {
            (factor(self.decomp.ell)?.exponent_of(p), euler_symbol(gen, p)?)
        };
        Ok(lambda_closed_form(p.norm(), k, r, chi) as i64)
    }

    /// λ_c(δ), cached by canonical c.
    pub fn lambda(&self, c: G) -> Result<i64> {
        let c = canon(c)?;
        if let Some(&v) = self.lambda_cache.read().expect("lambda cache").get(&c) {
            return Ok(v);
        }
        let f = factor(c)?;
        let mut v = 1i64;
        for &(p, k) in &f.factors {
            v *= self.local(p, k)?;
        }
        self.lambda_cache.write().expect("lambda cache").insert(c, v);
        Ok(v)
    }
}

/// L(s, δ) = Σ_{c ≠ 0} λ_c(δ)/N(c)^s over elements, for Re s > 1.
#[allow(non_snake_case)]
pub fn zagier_L(ctx: &ZagierContext, s: Complex64, params: &SeriesParams) -> Result<LValue> {
    let table = series_table(params)?;
    zagier_L_in(&table, ctx, s, params)
}

#[allow(non_snake_case)]
pub fn zagier_L_in(table: &IdealTable, ctx: &ZagierContext, s: Complex64, params: &SeriesParams) -> Result<LValue> {
    if s.re <= 1.0 {
        return Err(Error::domain(format!("the Zagier series is only summed for Re s > 1, got {s}")));
    }
    let reps = table.reps();
    let mut err = None;
    let coeffs: Vec<f64> = table
        .multiplicative(1i64, |p, e| {
            let v = reps[p].checked_pow(e).and_then(|q| ctx.lambda(q));
            v.unwrap_or_else(|e| {
                err.get_or_insert(e);
                0
            })
        })
        .into_iter()
        .map(|v| v as f64)
        .collect();
    if let Some(e) = err {
        return Err(e);
    }
    let v = sum_series(table, &coeffs, s, params)?;
    Ok(LValue { value: v.value * 4.0, error: v.error * 4.0 })
}

/// Zagier series for many discriminants over one shared ideal table.
///
/// λ_c(δ) is tabulated from the local closed forms, with χ_D at the primes
/// read off the fast symbol table instead of a Gaussian modular power.
#[derive(Debug)]
pub struct ZagierBatch {
    table: IdealTable,
    symbols: crate::characters::PrimeSymbolTable,
    prime_pos: HashMap<usize, usize>,
    params: SeriesParams,
}

impl ZagierBatch {
    pub fn new(params: SeriesParams) -> Result<Self> {
        let table = series_table(&params)?;
        let symbols = crate::characters::PrimeSymbolTable::new(&table);
        let prime_pos = table.primes().iter().enumerate().map(|(j, &k)| (k as usize, j)).collect();
        Ok(Self { table, symbols, prime_pos, params })
    }

    pub fn params(&self) -> &SeriesParams {
        &self.params
    }

    /// λ_c(δ) for every table entry c.
    pub fn coefficients(&self, delta: G) -> Result<Vec<f64>> {
        if !crate::characters::is_square_mod_four(delta) {
            return Err(Error::domain(format!("{delta} is not a square modulo 4")));
        }
        let dec = crate::characters::fundamental_decomposition(delta)?;
        let gen = dec.generator();
        let fl = factor(dec.ell)?;
        let chi = self.symbols.values(gen, dec.chi_two);
        let reps = self.table.reps();
        Ok(self.table.multiplicative(1.0f64, |p, e| {
            let rep = reps[p];
            let r = fl.exponent_of(rep);
            lambda_closed_form(rep.norm(), e, r, chi[self.prime_pos[&p]]) as f64
        }))
    }

    /// L(s, δ) in the element normalization, for Re s > 1.
    #[allow(non_snake_case)]
    pub fn zagier_L(&self, delta: G, s: Complex64) -> Result<LValue> {
        if s.re <= 1.0 {
            return Err(Error::domain(format!("the Zagier series is only summed for Re s > 1, got {s}")));
        }
        let coeffs = self.coefficients(delta)?;
        let v = sum_series(&self.table, &coeffs, s, &self.params)?;
        Ok(LValue { value: v.value * 4.0, error: v.error * 4.0 })
    }
}

/// Relative deviation |L(s,δ)/4 − T_ℓ(s)·L(s,χ_D)| / (|T_ℓ(s)·L(s,χ_D)| + 10⁻¹²),
/// both sides in the ideal normalization.
pub fn szmidt_check(delta: G, s: Complex64, params: &SeriesParams) -> Result<f64> {
    let table = series_table(params)?;
    szmidt_check_in(&table, delta, s, params)
}

pub fn szmidt_check_in(table: &IdealTable, delta: G, s: Complex64, params: &SeriesParams) -> Result<f64> {
    let ctx = ZagierContext::new(delta)?;
    let z = zagier_L_in(table, &ctx, s, params)?.value / 4.0;
    let gen = ctx.decomp.generator();
    if gen == G::ONE || gen == -G::ONE {
        return Err(Error::Degenerate(delta.to_string()));
    }
    check_half_plane(s, false, params)?;
    let coeffs = character_coefficients(table, gen, ctx.decomp.chi_two);
    let l = sum_series(table, &coeffs, s, params)?.value;
    let t = t_poly_with(ctx.decomp.ell, gen, ctx.decomp.chi_two, s)?;
    let rhs = t * l;
    Ok((z - rhs).norm() / (rhs.norm() + 1e-12))
}

/// L(1, δ) = T_ℓ(1)·L(1, χ_D), evaluated by the shared [`L1Engine`].
#[allow(non_snake_case)]
pub fn L1_disc(delta: G) -> Result<f64> {
    L1Engine::global().l1_disc(delta)
}
