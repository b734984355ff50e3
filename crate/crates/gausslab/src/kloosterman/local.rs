//! Local solution counts ρ_{p^k}(δ) and the coefficients λ_{p^k}(δ).
//!
//! For a discriminant δ (a square modulo 4) the count ρ_c(δ) is
//! multiplicative in c, so both ρ and λ are determined by prime powers:
//! λ_{p^k} = Σ_{i ≤ k/2} (ρ_{p^{k-2i}} − ρ_{p^{k-2i-1}}) with ρ_{p^{-1}} = 0.

use crate::characters::{euler_symbol, is_square_mod_four};
use crate::error::{Error, Result};
use crate::gaussian::GaussianInt;

type G = GaussianInt;

fn valuation(p: G, z: G) -> Result<u32> {
    if z.is_zero() {
        return Ok(u32::MAX);
    }
    let mut v = 0;
    let mut m = z;
    while p.divides(m) {
        m = m.exact_div(p)?;
        v += 1;
    }
    Ok(v)
}

/// #{x mod p^k : x² ≡ δ mod p^k} for an odd prime p, by Hensel's lemma.
fn odd_sqrt_count(p: G, k: u32, delta: G) -> Result<u128> {
    if k == 0 {
        return Ok(1);
    }
    let q = p.norm();
    let v = valuation(p, delta)?;
    if k <= v {
        return Ok(q.pow(k / 2));
    }
    if v % 2 == 1 {
        return Ok(0);
    }
    let w = v / 2;
    let unit = delta.exact_div(p.checked_pow(v)?)?;
    let s = euler_symbol(unit, p)?;
    Ok(q.pow(w) * (1 + s) as u128)
}

/// #{x mod (1+i)^{kx} : x² ≡ δ mod (1+i)^{km}} by digit search, km ≥ kx ≥ 2.
fn two_adic_sqrt_count(delta: G, kx: u32, km: u32) -> Result<u128> {
    let pi = G::ONE_PLUS_I;
    let pows: Vec<G> = (0..=km).map(|j| pi.checked_pow(j)).collect::<Result<_>>()?;
    // x mod π^j determines x² mod π^{min(2j, j+2)}
    let mut layer = vec![G::ZERO];
    for j in 0..kx {
        let mut next = Vec::with_capacity(layer.len() * 2);
        let depth = j + 1;
        let known = (2 * depth).min(depth + 2).min(km);
        for &x in &layer {
            for u in [G::ZERO, pows[j as usize]] {
                let y = x.checked_add(u)?;
                if pows[known as usize].divides(y.checked_mul(y)?.checked_sub(delta)?) {
                    next.push(y);
                }
            }
        }
        layer = next;
    }
    let modulus = pows[km as usize];
    let mut count = 0u128;
    for x in layer {
        if modulus.divides(x.checked_mul(x)?.checked_sub(delta)?) {
            count += 1;
        }
    }
    Ok(count)
}

/// ρ_{p^k}(δ) = #{x mod 2p^k : x² ≡ δ mod 4p^k} for δ a square mod 4.
pub fn rho_prime_power(p: G, k: u32, delta: G) -> Result<u128> {
    if k == 0 {
        return Ok(1);
    }
    if p == G::ONE_PLUS_I {
        two_adic_sqrt_count(delta, k + 2, k + 4)
    } else {
        // the factor at 1+i is #{x mod 2 : x² ≡ δ mod 4} = 1 for discriminants
        odd_sqrt_count(p, k, delta)
    }
}

/// λ_{p^k}(δ) through the local ρ counts.
pub fn lambda_local(p: G, k: u32, delta: G) -> Result<i128> {
    if !is_square_mod_four(delta) {
        return Err(Error::domain(format!("{delta} is not a square modulo 4")));
    }
    let rho = |j: i64| -> Result<i128> {
        if j < 0 {
            Ok(0)
        } else {
            Ok(rho_prime_power(p, j as u32, delta)? as i128)
        }
    };
    let mut s = 0i128;
    let k = k as i64;
    let mut i = 0;
    while 2 * i <= k {
        s += rho(k - 2 * i)? - rho(k - 2 * i - 1)?;
        i += 1;
    }
    Ok(s)
}

/// Closed form N(p)^a · χ(p)^{k−2a}, a = min(⌊k/2⌋, r), where r is the
/// exponent of p in ℓ and χ(p) the value of the primitive character at p.
/// When a < r the reduced discriminant is still divisible by p, so the
/// value vanishes unless k = 2a.
pub fn lambda_closed_form(q: u128, k: u32, r: u32, chi_p: i8) -> i128 {
    let a = (k / 2).min(r);
    let qa = q.pow(a) as i128;
    let rest = k - 2 * a;
    if rest == 0 {
        return qa;
    }
    if a < r {
        return 0;
    }
    qa * (chi_p as i128).pow(rest)
}
