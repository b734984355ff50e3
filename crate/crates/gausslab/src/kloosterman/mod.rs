//! Gaussian Kloosterman sums and the counting functions ρ(c,a), ρ_c(δ), λ_c(δ).
//!
//! Conventions for a unit modulus: Z[i]/(unit) is the zero ring and its unit
//! group is taken to have one element, so S(m,n,unit) = 1, ρ(unit,a) = 1 and
//! ρ_unit(δ) = λ_unit(δ) = 1.

mod local;
mod residue;
mod suite;

pub use local::{lambda_closed_form, lambda_local, rho_prime_power};
pub use residue::{ResidueSystem, DEFAULT_CAP};
pub use suite::{identity_suite, IdentityCheck, FLOAT_TOL, QUADRATIC_NORM_CAP};

use crate::characters::{quad_symbol, DiscriminantDecomposition};
use crate::error::{Error, Result};
use crate::gaussian::{canon, factor, gcd, GaussianInt};
use crate::numeric::{e, KahanComplex};
use num_complex::Complex64;
use std::f64::consts::TAU;

type G = GaussianInt;

/// Phase table exp(2πik/N(c)) together with Re(z·c̄) mod N(c).
struct Phases {
    c: G,
    n: i128,
    table: Vec<Complex64>,
}

impl Phases {
    fn new(c: G) -> Self {
        let n = c.norm() as i128;
        let table = (0..n).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64)).collect();
        Self { c, n, table }
    }

    /// ě_c(z) = e(Re(z/c)).
    #[inline]
    fn at(&self, z: G) -> Complex64 {
        let t = (z.re as i128 * self.c.re as i128 + z.im as i128 * self.c.im as i128).rem_euclid(self.n);
        self.table[t as usize]
    }
}

/// ě_c(z) = exp(2πi·Re(z/c)).
pub fn e_check(z: G, c: G) -> Complex64 {
    Phases::new(c).at(z)
}

/// S(m,n,c) = Σ_{a ∈ (Z[i]/c)^×} ě_c(ma + na*).
pub fn kloosterman_sum(m: G, n: G, c: G) -> Result<Complex64> {
    let rs = ResidueSystem::new(c)?;
    if c.is_unit() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let inv = rs.inverse_indices()?;
    let (m, n) = (rs.reduce(m), rs.reduce(n));
    let ph = Phases::new(c);
    let mut acc = KahanComplex::new();
    for (j, &k) in rs.unit_reps.iter().enumerate() {
        let a = rs.representatives[k];
        let ainv = rs.representatives[inv[j]];
        acc.add(ph.at(m * a + n * ainv));
    }
    Ok(acc.value())
}

/// ρ(c,a) for every class a, indexed like `rs.representatives`.
/// Uses ρ(c,a) = #{d unit : d + d* ≡ a}.
pub fn rho_table(rs: &ResidueSystem) -> Result<Vec<u32>> {
    if rs.modulus.is_unit() {
        return Ok(vec![1]);
    }
    let inv = rs.inverse_indices()?;
    let mut out = vec![0u32; rs.len()];
    for (j, &k) in rs.unit_reps.iter().enumerate() {
        let s = rs.representatives[k] + rs.representatives[inv[j]];
        out[rs.index_of(s)] += 1;
    }
    Ok(out)
}

/// ρ(c,a) = #{d mod c : d² − ad + 1 ≡ 0 mod c}, by exhaustion.
pub fn rho(c: G, a: G) -> Result<u64> {
    let rs = ResidueSystem::new(c)?;
    if c.is_unit() {
        return Ok(1);
    }
    let mut count = 0;
    for &d in &rs.representatives {
        if c.divides(d * d - a * d + G::ONE) {
            count += 1;
        }
    }
    Ok(count)
}

/// ρ_c(δ) = #{x mod 2c : x² ≡ δ mod 4c}, by exhaustion.
pub fn rho_disc(c: G, delta: G) -> Result<u64> {
    if c.is_zero() {
        return Err(Error::domain("rho_disc modulo zero"));
    }
    if c.is_unit() {
        return Ok(1);
    }
    let two_c = c.mul_int(2)?;
    let four_c = c.mul_int(4)?;
    let rs = ResidueSystem::new(two_c)?;
    let mut count = 0;
    for &x in &rs.representatives {
        if four_c.divides(x.checked_mul(x)?.checked_sub(delta)?) {
            count += 1;
        }
    }
    Ok(count)
}

/// λ_c(δ) = Σ_{c₁²c₂c₃ = c} μ(c₂)ρ_{c₃}(δ) by divisor enumeration.
pub fn lambda(c: G, delta: G) -> Result<i64> {
    if c.is_zero() {
        return Err(Error::domain("lambda at zero"));
    }
    let f = factor(c)?;
    let c = canon(c)?;
    let mut total = 0i64;
    for c1 in f.divisors()? {
        let c1sq = c1 * c1;
        if !c1sq.divides(c) {
            continue;
        }
        let rest = c.exact_div(c1sq)?;
        for c2 in crate::gaussian::divisors(rest)? {
            let mu = crate::gaussian::mobius(c2)?;
            if mu == 0 {
                continue;
            }
            let c3 = rest.exact_div(c2)?;
            total += mu as i64 * rho_disc(c3, delta)? as i64;
        }
    }
    Ok(total)
}

/// ρ_c(δ) rebuilt from λ through Σ_{c₁c₂ = c} μ(c₂)² λ_{c₁}(δ).
pub fn rho_from_lambda(c: G, delta: G) -> Result<i64> {
    let c = canon(c)?;
    let mut total = 0i64;
    for c1 in crate::gaussian::divisors(c)? {
        let c2 = c.exact_div(c1)?;
        let mu = crate::gaussian::mobius(c2)? as i64;
        total += mu * mu * lambda(c1, delta)?;
    }
    Ok(total)
}

/// N(p)^a · (δ p^{−2a} / p^{k−2a}) with a = min(⌊k/2⌋, r), r = v_p(ℓ).
/// Only odd primes are supported.
pub fn lambda_prime_power(p: G, k: u32, delta: G, decomp: &DiscriminantDecomposition) -> Result<i128> {
    if !p.is_odd() {
        return Err(Error::Unsupported("prime-power formula at the ramified prime 1+i".into()));
    }
    let f = factor(p)?;
    if f.factors.len() != 1 || f.factors[0].1 != 1 {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let p = f.factors[0].0;
    let r = factor(decomp.ell)?.exponent_of(p);
    let a = (k / 2).min(r);
    let qa = p.norm().pow(a) as i128;
    if k == 2 * a {
        return Ok(qa);
    }
    let reduced = delta.exact_div(p.checked_pow(2 * a)?)?;
    let pk = p.checked_pow(k - 2 * a)?;
    Ok(qa * quad_symbol(reduced, pk)? as i128)
}

/// Σ_{a mod c} ρ(c,a) ě_c(an); equals S(n,n,c).
pub fn kloosterman_via_rho(n: G, c: G) -> Result<Complex64> {
    let rs = ResidueSystem::new(c)?;
    if c.is_unit() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let rho = rho_table(&rs)?;
    let ph = Phases::new(c);
    let n = rs.reduce(n);
    let mut acc = KahanComplex::new();
    for (k, &a) in rs.representatives.iter().enumerate() {
        if rho[k] > 0 {
            acc.add(ph.at(a * n) * rho[k] as f64);
        }
    }
    Ok(acc.value())
}

/// |S(m,n,c)| / (|(m,n,c)|·τ(c)·N(c)^{1/2}).
pub fn weil_gundlach_margin(m: G, n: G, c: G) -> Result<f64> {
    let s = kloosterman_sum(m, n, c)?;
    let g3 = if m.is_zero() && n.is_zero() { canon(c)? } else { gcd(gcd(m, n)?, c)? };
    let denom = (g3.norm() as f64).sqrt() * factor(c)?.tau() as f64 * (c.norm() as f64).sqrt();
    Ok(s.norm() / denom)
}

/// |S(z,z,c) − Σ_{d | (c,z)} N(d) S(z²/d², 1, c/d)|.
pub fn selberg_kuznetsov_check(z: G, c: G) -> Result<f64> {
    let lhs = kloosterman_sum(z, z, c)?;
    let g = gcd(c, z)?;
    let mut rhs = KahanComplex::new();
    let zz = z * z;
    for d in crate::gaussian::divisors(g)? {
        let term = kloosterman_sum(zz.exact_div(d * d)?, G::ONE, c.exact_div(d)?)?;
        rhs.add(term * d.norm() as f64);
    }
    Ok((lhs - rhs.value()).norm())
}

/// Σ_{0 < N(c) ≤ C} S(n,n,c)/N(c) · e(D/|c|) over elements c.
pub fn linnik_selberg_sum(n: G, big_c: f64, dshift: f64) -> Result<Complex64> {
    if n.is_zero() {
        return Err(Error::domain("n must be nonzero"));
    }
    if big_c < 1.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let range = crate::gaussian::NormRange::new(0, big_c.floor() as u64)?;
    let cs = crate::gaussian::enumerate(range);
    if let Some(last) = cs.last() {
        if last.norm() > DEFAULT_CAP {
            return Err(Error::Resource(format!("modulus norm {} over cap", last.norm())));
        }
    }
    let terms = crate::par::try_map(crate::par::Exec::default(), &cs, |&c| -> Result<Complex64> {
        let nc = c.norm() as f64;
        Ok(kloosterman_via_rho(n, c)? / nc * e(dshift / nc.sqrt()))
    })?;
    Ok(terms.into_iter().collect::<KahanComplex>().value())
}

/// Σ_{a mod r} ((a²−4)/r) for odd squarefree r.
pub fn disc_mean(r: G) -> Result<i64> {
    if r.is_zero() || !r.is_odd() {
        return Err(Error::domain(format!("disc_mean needs an odd modulus, got {r}")));
    }
    let f = factor(r)?;
    if !f.is_squarefree() {
        return Err(Error::domain(format!("{r} is not squarefree")));
    }
    if r.is_unit() {
        return Ok(1);
    }
    let rs = ResidueSystem::new(r)?;
    let four = G::from_int(4);
    let mut s = 0i64;
    for &a in &rs.representatives {
        s += crate::characters::quad_symbol_factored(a * a - four, &f)? as i64;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{totient, NormRange};

    fn g(a: i64, b: i64) -> G {
        G::new(a, b)
    }

    #[test]
    fn kloosterman_examples() {
        let c = g(3, 2);
        let s = kloosterman_sum(G::ZERO, G::ZERO, c).unwrap();
        assert!((s.re - totient(c).unwrap() as f64).abs() < 1e-9 && s.im.abs() < 1e-9);
        assert_eq!(kloosterman_sum(g(5, 1), g(2, 2), G::I).unwrap(), Complex64::new(1.0, 0.0));
        let s = kloosterman_sum(G::ONE, G::ONE, g(1, 1)).unwrap();
        assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn symmetry_in_m_and_n() {
        for c in crate::gaussian::enumerate(NormRange::new(1, 30).unwrap()) {
            let s1 = kloosterman_sum(g(1, 2), g(3, -1), c).unwrap();
            let s2 = kloosterman_sum(g(3, -1), g(1, 2), c).unwrap();
            assert!((s1 - s2).norm() < 1e-9);
        }
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(G::ONE, g(7, 3)).unwrap(), 1);
        assert_eq!(rho(g(1, 1), G::ZERO).unwrap(), 1);
        let rs = ResidueSystem::new(g(1, 1)).unwrap();
        let total: u64 = rs.representatives.iter().map(|&a| rho(g(1, 1), a).unwrap()).sum();
        assert_eq!(total, 1);
        assert_eq!(rho_disc(G::I, g(5, 5)).unwrap(), 1);
        assert_eq!(lambda(G::ONE, g(3, 3)).unwrap(), 1);
    }

    #[test]
    fn rho_disc_three_one_by_hand() {
        // x mod 6 with x² ≡ 1 mod 12: count directly over the 36 classes
        let mut count = 0;
        for a in 0..6 {
            for b in 0..6 {
                let x = g(a, b);
                let d = x * x - G::ONE;
                if d.re % 12 == 0 && d.im % 12 == 0 {
                    count += 1;
                }
            }
        }
        assert_eq!(rho_disc(g(3, 0), G::ONE).unwrap(), count);
    }

    #[test]
    fn rho_table_matches_direct_count() {
        for c in [g(1, 1), g(2, 0), g(3, 0), g(2, 1), g(4, 2), g(5, 0)] {
            let rs = ResidueSystem::new(c).unwrap();
            let t = rho_table(&rs).unwrap();
            for (k, &a) in rs.representatives.iter().enumerate() {
                assert_eq!(t[k] as u64, rho(c, a).unwrap());
            }
        }
    }

    #[test]
    fn prime_power_examples() {
        let delta = g(9 * 5, 9 * 2);
        let dec = crate::characters::fundamental_decomposition(delta).unwrap();
        assert_eq!(lambda_prime_power(g(2, 1), 0, delta, &dec).unwrap(), 1);
        let p = g(1, 2);
        assert_eq!(lambda_prime_power(p, 1, delta, &dec).unwrap(), quad_symbol(delta, p).unwrap() as i128);
        assert_eq!(lambda_prime_power(g(3, 0), 2, delta, &dec).unwrap(), 9);
        assert_eq!(lambda_prime_power(g(3, 0), 1, delta, &dec).unwrap(), 0);
        assert!(matches!(lambda_prime_power(g(1, 1), 1, delta, &dec), Err(Error::Unsupported(_))));
        assert!(lambda_prime_power(g(5, 0), 1, delta, &dec).is_err());
    }

    #[test]
    fn prime_power_formula_matches_divisor_sum() {
        let deltas = [g(45, 0), g(-3, 0), g(5, 0), g(-4, 8), g(21, 0), g(-75, 0), g(7, 4), g(-15, 20)];
        for &delta in &deltas {
            let dec = crate::characters::fundamental_decomposition(delta).unwrap();
            for p in [g(3, 0), g(2, 1), g(1, 2), g(3, 2), g(7, 0)] {
                for k in 0..=3 {
                    let c = p.checked_pow(k).unwrap();
                    if c.norm() > 400 {
                        continue;
                    }
                    let formula = lambda_prime_power(p, k, delta, &dec).unwrap();
                    assert_eq!(formula, lambda(c, delta).unwrap() as i128, "p={p} k={k} d={delta}");
                    assert_eq!(formula, lambda_local(p, k, delta).unwrap(), "p={p} k={k} d={delta}");
                }
            }
            for k in 0..=4 {
                let c = G::ONE_PLUS_I.checked_pow(k).unwrap();
                assert_eq!(lambda_local(G::ONE_PLUS_I, k, delta).unwrap(), lambda(c, delta).unwrap() as i128);
            }
        }
    }

    #[test]
    fn rho_recovered_from_lambda() {
        for c in crate::gaussian::enumerate(NormRange::new(1, 40).unwrap()) {
            for delta in [g(5, 0), g(-3, 0), g(12, 0), g(-4, 8)] {
                assert_eq!(rho_from_lambda(c, delta).unwrap(), rho_disc(c, delta).unwrap() as i64);
            }
        }
    }

    #[test]
    fn kloosterman_identities_small_moduli() {
        for c in crate::gaussian::enumerate(NormRange::new(1, 50).unwrap()) {
            for n in [G::ONE, g(1, 1), g(2, -1), g(3, 0)] {
                let s = kloosterman_sum(n, n, c).unwrap();
                let r = kloosterman_via_rho(n, c).unwrap();
                assert!((s - r).norm() < 1e-8, "c={c} n={n}");
                assert!(selberg_kuznetsov_check(n, c).unwrap() < 1e-8, "c={c} n={n}");
                assert!(weil_gundlach_margin(n, g(2, 1), c).unwrap() <= 1.0 + 1e-9, "c={c} n={n}");
            }
        }
    }

    #[test]
    fn kloosterman_via_rho_examples() {
        assert_eq!(kloosterman_via_rho(g(2, 3), G::ONE).unwrap(), Complex64::new(1.0, 0.0));
        let c = g(4, 1);
        let v = kloosterman_via_rho(G::ZERO, c).unwrap();
        assert!((v.re - totient(c).unwrap() as f64).abs() < 1e-9);
    }

    #[test]
    fn disc_mean_examples() {
        assert_eq!(disc_mean(G::ONE).unwrap(), 1);
        assert!(disc_mean(g(1, 1)).is_err());
        assert!(disc_mean(g(9, 0)).is_err());
        let v = disc_mean(g(3, 0)).unwrap();
        assert!(v.abs() <= 9);
    }

    #[test]
    fn linnik_small_cases() {
        assert_eq!(linnik_selberg_sum(G::ONE, 0.5, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        let v = linnik_selberg_sum(G::ONE, 1.0, 0.0).unwrap();
        assert!((v - Complex64::new(4.0, 0.0)).norm() < 1e-12);
    }
}
