//! Exact lattice sums: the bilinear form 𝓕(A,B,C), the Bessel sums of ρ and
//! λ along n²−4, Iwaniec's congruence sums and squarefree counts.

use crate::characters::quad_symbol_factored;
use crate::error::{Error, Result};
use crate::gaussian::{canon, divisors, factor, for_each_in_range, gcd, mobius, totient, GaussianInt, IdealTable, NormRange};
use crate::kloosterman::{disc_mean, rho_table, ResidueSystem};
use crate::numeric::{linear_fit, median};
use crate::par::{self, Exec};
use serde::Serialize;
use std::f64::consts::PI;

type G = GaussianInt;

/// Convention factor of element lattice counts against the ideal-normalized
/// ζ_{Q(i)}(2): counts over all four associates in a disc of norm S carry
/// π·S/4 ideals times 4, so ν = π. Pinned; the calibration from squarefree
/// counts in the test suite reproduces it.
pub const NU: f64 = PI;

/// ζ_{Q(i)}(2) = ζ(2)·L(2, χ₋₄) = π²G/6 (G is Catalan's constant).
pub const ZETA_QI_2: f64 = PI * PI * 0.915_965_594_177_219 / 6.0;

fn annulus(lo: f64, hi: f64) -> Result<NormRange> {
    NormRange::new(lo.max(0.0).floor() as u64, hi.max(0.0).floor() as u64)
}

/// 𝓕(A,B,C) = Σ_{B < N(a) ≤ A+B} Σ_{0 < N(c) ≤ C} ρ(c,a) over elements, with
/// main term ν·π·A·C/ζ_{Q(i)}(2).
#[allow(non_snake_case)]
pub fn bilinear_F(a_len: f64, b: f64, c_max: f64) -> Result<(u64, f64)> {
    if !(a_len >= 1.0 && a_len <= b.abs()) {
        return Err(Error::domain(format!("need 1 ≤ A ≤ |B|, got A = {a_len}, B = {b}")));
    }
    let main = NU * PI * a_len * c_max.max(0.0) / ZETA_QI_2;
    if c_max < 1.0 {
        return Ok((0, main));
    }
    let mut avals = Vec::new();
    for_each_in_range(annulus(b, a_len + b)?, |z| avals.push(z));
    let cs = crate::gaussian::enumerate(NormRange::new(0, c_max.floor() as u64)?);
    let per_c = par::try_map(Exec::default(), &cs, |&c| -> Result<u64> {
        let rs = ResidueSystem::new(c)?;
        let t = rho_table(&rs)?;
        Ok(avals.iter().map(|&a| t[rs.index_of(a)] as u64).sum())
    })?;
    Ok((per_c.iter().sum(), main))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselSum {
    pub value: i64,
    pub main: f64,
    pub err: f64,
}

/// Elements with N(n) ≤ z, sorted by norm.
fn disc_elements(z: f64) -> Result<Vec<G>> {
    if !(z >= 1.0) {
        return Err(Error::domain(format!("Z must be at least 1, got {z}")));
    }
    Ok(crate::gaussian::enumerate(NormRange::new(0, z.floor() as u64)?))
}

/// The function n ↦ ρ_c(n²−4) as a table on classes mod c. Counting
/// x mod 2c with x² ≡ n²−4 mod 4c is the same as counting d mod c with
/// d² − nd + 1 ≡ 0 (the map is x = 2d − n), so the table is ρ(c,·).
fn rho_along(c: G) -> Result<(ResidueSystem, Vec<u32>)> {
    let rs = ResidueSystem::new(c)?;
    let t = rho_table(&rs)?;
    Ok((rs, t))
}

/// Σ_{N(n) ≤ Z} ρ_c(n²−4) over elements, against πZ·φ(c)/N(c).
pub fn bessel_sum_rho(c: G, z: f64) -> Result<BesselSum> {
    let ns = disc_elements(z)?;
    let (rs, t) = rho_along(c)?;
    let value: i64 = ns.iter().map(|&n| t[rs.index_of(n)] as i64).sum();
    let main = PI * z * totient(c)? as f64 / c.norm() as f64;
    Ok(BesselSum { value, main, err: value as f64 - main })
}

/// Σ_{c₁²c₂ = c} μ(c₂)/N(c₂).
pub fn lambda_main_factor(c: G) -> Result<f64> {
    let c = canon(c)?;
    let mut s = 0.0;
    for c1 in divisors(c)? {
        let sq = c1 * c1;
        if !sq.divides(c) {
            continue;
        }
        let c2 = c.exact_div(sq)?;
        s += mobius(c2)? as f64 / c2.norm() as f64;
    }
    Ok(s)
}

/// Σ_{N(n) ≤ Z} λ_c(n²−4) over elements, against πZ·Σ_{c₁²c₂=c} μ(c₂)/N(c₂).
pub fn bessel_sum_lambda(c: G, z: f64) -> Result<BesselSum> {
    let ns = disc_elements(z)?;
    let c = canon(c)?;
    // λ_c = Σ_{c₁²c₂c₃ = c} μ(c₂)·ρ_{c₃}
    let mut parts: Vec<(i64, ResidueSystem, Vec<u32>)> = Vec::new();
    for c1 in divisors(c)? {
        let sq = c1 * c1;
        if !sq.divides(c) {
            continue;
        }
        let rest = c.exact_div(sq)?;
        for c2 in divisors(rest)? {
            let mu = mobius(c2)? as i64;
            if mu == 0 {
                continue;
            }
            let (rs, t) = rho_along(rest.exact_div(c2)?)?;
            parts.push((mu, rs, t));
        }
    }
    let value: i64 = ns
        .iter()
        .map(|&n| parts.iter().map(|(mu, rs, t)| mu * t[rs.index_of(n)] as i64).sum::<i64>())
        .sum();
    let main = PI * z * lambda_main_factor(c)?;
    Ok(BesselSum { value, main, err: value as f64 - main })
}

/// Regression of the Bessel-sum error size against Z.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    /// Slope of log RMS error against log Z, one per modulus.
    pub slopes: Vec<f64>,
    pub median_slope: f64,
    /// Common slope with a separate intercept per modulus.
    pub pooled_slope: f64,
    pub pooled_se: f64,
    /// pooled_slope ± 1.96·pooled_se
    pub ci: (f64, f64),
}

/// Error exponent of Σ_{N(n) ≤ Z} ρ_c(n²−4) − πZφ(c)/N(c) in Z.
///
/// The error is a step function of Z, so each grid point is measured by the
/// RMS error over `window` values of Z spread evenly over [Z, 1.25·Z].
pub fn bessel_error_exponent(cs: &[G], z_grid: &[f64], window: usize) -> Result<ExponentReport> {
    if z_grid.len() < 2 || cs.is_empty() || window == 0 {
        return Err(Error::domain("need at least two Z values, one modulus and a nonempty window"));
    }
    let zmax = z_grid.iter().cloned().fold(0.0, f64::max) * 1.25;
    let ns = disc_elements(zmax)?;
    let norms: Vec<u64> = ns.iter().map(|n| n.norm() as u64).collect();
    let curves = par::try_map(Exec::default(), cs, |&c| -> Result<Vec<f64>> {
        let (rs, t) = rho_along(c)?;
        let dens = totient(c)? as f64 / c.norm() as f64;
        let mut prefix = Vec::with_capacity(ns.len());
        let mut acc = 0i64;
        for &n in &ns {
            acc += t[rs.index_of(n)] as i64;
            prefix.push(acc);
        }
        let mut out = Vec::with_capacity(z_grid.len());
        for &z in z_grid {
            let mut ss = 0.0;
            for j in 0..window {
                let zz = z * (1.0 + 0.25 * j as f64 / window as f64);
                let k = norms.partition_point(|&m| (m as f64) <= zz);
                let v = if k == 0 { 0 } else { prefix[k - 1] };
                let e = v as f64 - PI * zz * dens;
                ss += e * e;
            }
            out.push((ss / window as f64).sqrt().max(1e-12).ln());
        }
        Ok(out)
    })?;
    let lz: Vec<f64> = z_grid.iter().map(|z| z.ln()).collect();
    let mut slopes = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for curve in &curves {
        let (_, b, _) = linear_fit(&lz, curve).ok_or_else(|| Error::Fit("degenerate Z grid".into()))?;
        slopes.push(b);
        let mx = lz.iter().sum::<f64>() / lz.len() as f64;
        let my = curve.iter().sum::<f64>() / curve.len() as f64;
        for (x, y) in lz.iter().zip(curve) {
            xs.push(x - mx);
            ys.push(y - my);
        }
    }
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let pooled = xs.iter().zip(&ys).map(|(x, y)| x * y).sum::<f64>() / sxx;
    let dof = xs.len() as f64 - curves.len() as f64 - 1.0;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - pooled * x).powi(2)).sum();
    let se = if dof > 0.0 { (rss / dof / sxx).sqrt() } else { f64::INFINITY };
    Ok(ExponentReport {
        median_slope: median(&slopes),
        slopes,
        pooled_slope: pooled,
        pooled_se: se,
        ci: (pooled - 1.96 * se, pooled + 1.96 * se),
    })
}

/// Σ_{B < N(a) ≤ A+B, a ≡ b mod ℓ} ((a²−4)/r) over elements, against
/// πA·μ(r)/N(ℓr) with μ(r) computed as Σ_{a mod r} ((a²−4)/r).
pub fn iwaniec_sum(a_len: f64, b_lo: f64, ell: G, b: G, r: G) -> Result<(i64, f64)> {
    if ell.is_zero() || r.is_zero() || !r.is_odd() {
        return Err(Error::domain("need ℓ ≠ 0 and r odd"));
    }
    let fr = factor(r)?;
    if !fr.is_squarefree() {
        return Err(Error::domain(format!("{r} is not squarefree")));
    }
    if !gcd(ell, r)?.is_unit() {
        return Err(Error::domain(format!("ℓ = {ell} and r = {r} are not coprime")));
    }
    let mu = disc_mean(r)?;
    let main = PI * a_len * mu as f64 / (ell.norm() * r.norm()) as f64;
    let rs = ResidueSystem::new(r)?;
    let four = G::from_int(4);
    let table = rs
        .representatives
        .iter()
        .map(|&a| quad_symbol_factored(a * a - four, &fr))
        .collect::<Result<Vec<i8>>>()?;
    let ell_sys = ResidueSystem::new(ell)?;
    let target = ell_sys.index_of(b);
    let mut value = 0i64;
    for_each_in_range(annulus(b_lo, a_len + b_lo)?, |a| {
        if ell_sys.index_of(a) == target {
            value += table[rs.index_of(a)] as i64;
        }
    });
    Ok((value, main))
}

/// #{s : N(s) ≤ S, s squarefree, (s,q) = 1} over elements, against
/// ν·S/ζ_{Q(i)}(2)·Π_{p|q} (1 + 1/N(p))^{−1}.
pub fn squarefree_count(s_max: f64, q: G) -> Result<(u64, f64)> {
    if q.is_zero() {
        return Err(Error::domain("q must be nonzero"));
    }
    let fq = factor(q)?;
    let euler: f64 = fq.factors.iter().map(|&(p, _)| 1.0 / (1.0 + 1.0 / p.norm() as f64)).product();
    let main = NU * s_max.max(0.0) / ZETA_QI_2 * euler;
    if s_max < 1.0 {
        return Ok((0, main));
    }
    let table = IdealTable::new(s_max.floor() as u64)?;
    let reps = table.reps();
    let bad: Vec<G> = fq.factors.iter().map(|f| f.0).collect();
    let sf = table.multiplicative(1u8, |p, e| u8::from(e == 1 && !bad.contains(&reps[p])));
    let ideals = sf.iter().filter(|&&v| v == 1).count() as u64;
    Ok((4 * ideals, main))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kloosterman::rho_disc;

    fn g(a: i64, b: i64) -> G {
        G::new(a, b)
    }

    #[test]
    fn bilinear_small_cases() {
        assert_eq!(bilinear_F(10.0, 100.0, 0.5).unwrap().0, 0);
        let (v, _) = bilinear_F(10.0, 100.0, 1.0).unwrap();
        let annulus_count = crate::gaussian::count_in_range(NormRange::new(100, 110).unwrap());
        assert_eq!(v, 4 * annulus_count);
        assert!(bilinear_F(0.5, 100.0, 1.0).is_err());
    }

    #[test]
    fn rho_along_matches_disc_count() {
        for c in [g(3, 0), g(1, 1), g(2, 0), g(2, 1), g(3, 3)] {
            let (rs, t) = rho_along(c).unwrap();
            for n in crate::gaussian::enumerate(NormRange::new(0, 30).unwrap()) {
                let d = n * n - g(4, 0);
                assert_eq!(t[rs.index_of(n)] as u64, rho_disc(c, d).unwrap(), "c={c} n={n}");
            }
        }
    }

    #[test]
    fn bessel_unit_is_lattice_count() {
        let b = bessel_sum_rho(G::ONE, 1000.0).unwrap();
        assert_eq!(b.value as u64, crate::gaussian::count_in_range(NormRange::new(0, 1000).unwrap()));
        let squarefree = g(2, 1);
        let l = bessel_sum_lambda(squarefree, 100.0).unwrap();
        assert!((l.main - -(PI * 100.0) / 5.0).abs() < 1e-9);
    }

    #[test]
    fn bessel_main_terms_invert() {
        for c in [g(3, 0), g(2, 0), g(4, 0), g(2, 2), g(9, 0), g(6, 3)] {
            let c = canon(c).unwrap();
            let mut s = 0.0;
            for c1 in divisors(c).unwrap() {
                let c2 = c.exact_div(c1).unwrap();
                let mu = mobius(c2).unwrap() as f64;
                s += mu * mu * bessel_sum_lambda(c1, 500.0).unwrap().main;
            }
            let direct = bessel_sum_rho(c, 500.0).unwrap().main;
            assert!((s - direct).abs() < 1e-9, "c={c}");
            // and the exact values invert the same way
            let mut v = 0;
            for c1 in divisors(c).unwrap() {
                let c2 = c.exact_div(c1).unwrap();
                let mu = mobius(c2).unwrap() as i64;
                v += mu * mu * bessel_sum_lambda(c1, 500.0).unwrap().value;
            }
            assert_eq!(v, bessel_sum_rho(c, 500.0).unwrap().value);
        }
    }

    #[test]
    fn bessel_lambda_agrees_with_local_formula() {
        let c = g(6, 3);
        let z = 200.0;
        let mut v = 0i64;
        for n in crate::gaussian::enumerate(NormRange::new(0, 200).unwrap()) {
            let delta = n * n - g(4, 0);
            v += crate::kloosterman::lambda(c, delta).unwrap();
        }
        assert_eq!(v, bessel_sum_lambda(c, z).unwrap().value);
    }

    #[test]
    fn iwaniec_unit_and_trivial_congruence() {
        let (v, m) = iwaniec_sum(1000.0, 10_000.0, G::ONE, G::ZERO, G::ONE).unwrap();
        assert_eq!(v as u64, crate::gaussian::count_in_range(NormRange::new(10_000, 11_000).unwrap()));
        assert!((m - PI * 1000.0).abs() < 1e-9);
        assert!(iwaniec_sum(10.0, 100.0, G::ONE, G::ZERO, g(1, 1)).is_err());
        assert!(iwaniec_sum(10.0, 100.0, g(3, 0), G::ZERO, g(3, 0)).is_err());
    }

    #[test]
    fn squarefree_small_counts() {
        assert_eq!(squarefree_count(0.5, G::ONE).unwrap().0, 0);
        let (v, _) = squarefree_count(50.0, G::ONE).unwrap();
        let direct = crate::gaussian::enumerate(NormRange::new(0, 50).unwrap())
            .into_iter()
            .filter(|&z| crate::gaussian::is_squarefree(z).unwrap())
            .count() as u64;
        assert_eq!(v, direct);
        let (v2, _) = squarefree_count(50.0, g(2, 0)).unwrap();
        let direct2 = crate::gaussian::enumerate(NormRange::new(0, 50).unwrap())
            .into_iter()
            .filter(|&z| crate::gaussian::is_squarefree(z).unwrap() && z.is_odd())
            .count() as u64;
        assert_eq!(v2, direct2);
    }
}
