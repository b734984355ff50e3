//! Quadratic residue symbols over Z[i], discriminant decompositions,
//! conductors, short character sums and the quadratic large sieve.

mod fast;
mod sums;

pub use fast::{PrimeKind, PrimeSymbolTable};
pub use sums::{
    exponent_fit, exponent_fit_by, exponent_fit_samples, large_sieve_ratio, random_sign_coeffs, short_char_sum, ExponentFit,
    LargeSieveSetup,
};

use crate::error::{Error, Result};
use crate::gaussian::{canonical_associate, factor, unit_inverse, Factorization, GaussianInt};
use crate::kloosterman::ResidueSystem;
use serde::{Deserialize, Serialize};

type G = GaussianInt;

/// Reduce z modulo p to a small representative (rounded Euclidean remainder).
fn red(z: G, p: G) -> Result<G> {
    z.rem(p)
}

/// Euler symbol of d at an odd prime p: the element of {-1, 0, 1}
/// congruent to d^{(N(p)-1)/2} modulo p.
pub fn euler_symbol(d: G, p: G) -> Result<i8> {
    if !p.is_odd() {
        return Err(Error::domain(format!("Euler symbol needs an odd prime, got {p}")));
    }
    let mut e = (p.norm() - 1) / 2;
    let mut b = red(d, p)?;
    let mut r = G::ONE;
    while e > 0 {
        if e & 1 == 1 {
            r = red(r.checked_mul(b)?, p)?;
        }
        b = red(b.checked_mul(b)?, p)?;
        e >>= 1;
    }
    if r.is_zero() {
        Ok(0)
    } else if p.divides(r.checked_sub(G::ONE)?) {
        Ok(1)
    } else if p.divides(r.checked_add(G::ONE)?) {
        Ok(-1)
    } else {
        Err(Error::domain(format!("{p} is not prime: Euler power {r}")))
    }
}

/// Generalised Jacobi symbol (d/n) for odd n ≠ 0.
pub fn quad_symbol(d: G, n: G) -> Result<i8> {
    if n.is_zero() || !n.is_odd() {
        return Err(Error::domain(format!("quadratic symbol needs an odd modulus, got {n}")));
    }
    quad_symbol_factored(d, &factor(n)?)
}

/// (d/n) from a known factorisation of the odd modulus n.
pub fn quad_symbol_factored(d: G, n: &Factorization) -> Result<i8> {
    let mut v = 1i8;
    for &(p, k) in &n.factors {
        let s = euler_symbol(d, p)?;
        if k % 2 == 1 {
            v *= s;
        } else {
            v *= s * s;
        }
        if v == 0 {
            break;
        }
    }
    Ok(v)
}

/// Whether z is congruent to a square modulo 4, i.e. to one of 0, 1, -1, 2i.
pub fn is_square_mod_four(z: G) -> bool {
    matches!((z.re.rem_euclid(4), z.im.rem_euclid(4)), (0, 0) | (1, 0) | (3, 0) | (0, 2))
}

/// Whether z is a perfect square in Z[i] (zero counts as a square).
pub fn is_perfect_square(z: G) -> Result<bool> {
    if z.is_zero() {
        return Ok(true);
    }
    let f = factor(z)?;
    // -1 = i² is a square; ±i are not.
    Ok(f.factors.iter().all(|&(_, e)| e % 2 == 0) && f.unit.im == 0)
}

/// δ ∼ D·ℓ² with explicit unit: delta = unit · d · ell².
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantDecomposition {
    pub delta: G,
    /// Canonical associate of the character generator delta/ell².
    pub d: G,
    pub ell: G,
    pub unit: G,
    /// Value of the character at the ramified prime 1+i.
    pub chi_two: i8,
}

impl DiscriminantDecomposition {
    /// The generator unit·d that actually defines the symbol.
    pub fn generator(&self) -> G {
        self.unit * self.d
    }
}

fn check_nondegenerate(delta: G) -> Result<()> {
    if delta.is_zero() || is_perfect_square(delta)? {
        return Err(Error::Degenerate(delta.to_string()));
    }
    Ok(())
}

/// The 2-adic part of the decomposition: (r, χ(1+i)) where (1+i)^r is the
/// exact power of 1+i in ℓ.
///
/// r is the largest exponent with δ/(1+i)^{2r} still a square modulo 4. If
/// no such r exists then 1+i ramifies; its full square part goes into ℓ and
/// χ(1+i) = 0. For an odd reduced generator the value at 1+i is read off the
/// local solution count #{x mod 2(1+i) : x² ≡ D mod 4(1+i)} − 1.
pub fn two_adic_split(delta: G) -> Result<(u32, i8)> {
    let pi = G::ONE_PLUS_I;
    let mut v = 0u32;
    let mut z = delta;
    let mut stack = vec![z];
    while pi.divides(z) {
        z = z.exact_div(pi)?;
        v += 1;
        if v.is_multiple_of(2) {
            stack.push(z);
        }
    }
    // stack[r] = delta / (1+i)^{2r}
    for r in (0..stack.len()).rev() {
        let dr = stack[r];
        if is_square_mod_four(dr) {
            let chi = if !dr.is_odd() { 0 } else { local_count_at_two(dr)? as i8 - 1 };
            return Ok((r as u32, chi));
        }
    }
    Ok((v / 2, 0))
}

/// #{x mod 2(1+i) : x² ≡ d mod 4(1+i)} by exhaustion over 8 classes.
fn local_count_at_two(d: G) -> Result<u32> {
    let m = G::new(4, 4); // 4(1+i)
    let mut count = 0;
    for x in ResidueSystem::new(G::new(2, 2))?.representatives {
        if m.divides(x.checked_mul(x)?.checked_sub(d)?) {
            count += 1;
        }
    }
    Ok(count)
}

/// Decompose a nondegenerate δ as unit·D·ℓ².
///
/// The odd part of ℓ is Π p^{⌊v_p/2⌋}; the 2-part comes from
/// [`two_adic_split`]. D is canonical and the unit is kept explicitly,
/// because (iD/n) and (D/n) differ as characters.
pub fn fundamental_decomposition(delta: G) -> Result<DiscriminantDecomposition> {
    check_nondegenerate(delta)?;
    let f = factor(delta)?;
    let (r, chi_two) = two_adic_split(delta)?;
    let mut ell = G::ONE;
    for &(p, e) in &f.factors {
        let k = if p == G::ONE_PLUS_I { r } else { e / 2 };
        ell = ell.checked_mul(p.checked_pow(k)?)?;
    }
    let gen = delta.exact_div(ell.checked_mul(ell)?)?;
    let (u, d) = canonical_associate(gen)?;
    let dec = DiscriminantDecomposition { delta, d, ell, unit: unit_inverse(u), chi_two };
    debug_assert_eq!(dec.unit * dec.d * dec.ell * dec.ell, delta);
    Ok(dec)
}

/// A quadratic character n ↦ (D/n) on odd n, extended to 1+i by its value
/// χ(1+i) so that it is totally multiplicative on all of Z[i] \ {0}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticCharacter {
    /// Canonical associate of the generator.
    pub d: G,
    pub unit: G,
    pub conductor: G,
    pub chi_two: i8,
}

impl QuadraticCharacter {
    /// The character attached to a nondegenerate discriminant.
    pub fn for_disc(delta: G) -> Result<Self> {
        Self::from_decomposition(&fundamental_decomposition(delta)?)
    }

    pub fn from_decomposition(dec: &DiscriminantDecomposition) -> Result<Self> {
        let conductor = conductor_from_decomposition(dec)?;
        Ok(Self { d: dec.d, unit: dec.unit, conductor, chi_two: dec.chi_two })
    }

    /// The trivial character (conductor 1).
    pub fn trivial() -> Self {
        Self { d: G::ONE, unit: G::ONE, conductor: G::ONE, chi_two: 1 }
    }

    pub fn is_trivial(&self) -> bool {
        self.d == G::ONE && self.unit.im == 0
    }

    pub fn generator(&self) -> G {
        self.unit * self.d
    }

    /// χ(n) for any nonzero n.
    pub fn eval(&self, n: G) -> Result<i8> {
        eval_with(self.generator(), self.chi_two, n)
    }

    /// χ on odd n only (the symbol itself).
    pub fn eval_odd(&self, n: G) -> Result<i8> {
        quad_symbol(self.generator(), n)
    }
}

/// The character with generator `gen` and value `chi_two` at 1+i, at n ≠ 0.
/// Needs no conductor, which makes it the cheap path inside long sweeps.
pub fn eval_with(gen: G, chi_two: i8, n: G) -> Result<i8> {
    if n.is_zero() {
        return Err(Error::domain("character at zero"));
    }
    let mut m = n;
    let mut v = 0;
    while !m.is_odd() {
        m = m.exact_div(G::ONE_PLUS_I)?;
        v += 1;
    }
    let two = if v == 0 { 1 } else { chi_two.pow(v) };
    if two == 0 {
        return Ok(0);
    }
    Ok(two * quad_symbol(gen, m)?)
}

fn conductor_from_decomposition(dec: &DiscriminantDecomposition) -> Result<G> {
    let gen = dec.generator();
    let f = factor(dec.d)?;
    let mut odd = G::ONE;
    for &(p, e) in &f.factors {
        if p != G::ONE_PLUS_I && e % 2 == 1 {
            odd = odd.checked_mul(p)?;
        }
    }
    if dec.chi_two != 0 {
        return crate::gaussian::canon(odd);
    }
    // Scan the 2-component: χ₂(u) = χ(n) with n ≡ u mod (1+i)^7, n ≡ 1 mod odd.
    const TOP: u32 = 7;
    let big = G::ONE_PLUS_I.checked_pow(TOP)?;
    let classes = ResidueSystem::new(big)?;
    let lift_inv = if odd.is_unit() {
        G::ZERO
    } else {
        crate::gaussian::mod_inverse(big, odd)?.ok_or_else(|| Error::Consistency("CRT failure".into()))?
    };
    let mut vals = Vec::new();
    for &k in &classes.unit_reps {
        let u = classes.representatives[k];
        let n = if odd.is_unit() {
            u
        } else {
            // n = u + big·t with t ≡ (1 − u)·big⁻¹ (mod odd)
            let t = G::ONE.checked_sub(u)?.checked_mul(lift_inv)?.rem(odd)?;
            u.checked_add(big.checked_mul(t)?)?
        };
        vals.push((u, quad_symbol(gen, n)?));
    }
    for fexp in 0..=TOP {
        let m = G::ONE_PLUS_I.checked_pow(fexp)?;
        let ok = vals.iter().all(|&(u, s)| s == 1 || !m.divides(u - G::ONE));
        if ok {
            return crate::gaussian::canon(odd.checked_mul(m)?);
        }
    }
    Err(Error::Consistency(format!("2-adic conductor of {} exceeds (1+i)^{TOP}", dec.delta)))
}

/// Canonical generator of the conductor of n ↦ (δ/n).
pub fn conductor_of_disc(delta: G) -> Result<G> {
    let dec = fundamental_decomposition(delta)?;
    conductor_from_decomposition(&dec)
}

/// Exhaustive conductor: the smallest-norm divisor 𝔡 of 4δ such that
/// (δ/n) is constant on odd classes mod 𝔡 coprime to δ, checked over every
/// odd residue modulo 4δ. Used as an oracle for small δ.
pub fn conductor_exhaustive(delta: G) -> Result<G> {
    check_nondegenerate(delta)?;
    let four = delta.mul_int(4)?;
    let sys = ResidueSystem::new(four)?;
    let mut vals = Vec::new();
    for &n in &sys.representatives {
        if !n.is_odd() || !crate::gaussian::gcd(n, delta)?.is_unit() {
            continue;
        }
        vals.push((n, quad_symbol(delta, n)?));
    }
    for d in crate::gaussian::divisors(four)? {
        let sub = ResidueSystem::new(d)?;
        let mut seen: Vec<i8> = vec![0; sub.len()];
        let mut ok = true;
        for &(n, s) in &vals {
            let k = sub.index_of(n);
            if seen[k] == 0 {
                seen[k] = s;
            } else if seen[k] != s {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(d);
        }
    }
    unreachable!("4δ itself is always a period")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{enumerate, NormRange};

    fn g(a: i64, b: i64) -> G {
        G::new(a, b)
    }

    /// Oracle: d is a square mod the odd prime p iff some x has x² ≡ d.
    fn symbol_by_squares(d: G, p: G) -> i8 {
        if p.divides(d) {
            return 0;
        }
        let sys = ResidueSystem::new(p).unwrap();
        let hit = sys.representatives.iter().any(|&x| p.divides(x * x - d));
        if hit {
            1
        } else {
            -1
        }
    }

    #[test]
    fn symbol_examples() {
        assert_eq!(quad_symbol(g(5, 3), G::I).unwrap(), 1);
        assert_eq!(quad_symbol(G::ONE, g(7, 2)).unwrap(), 1);
        assert_eq!(quad_symbol(G::I, g(1, 2)).unwrap(), -1);
        assert_eq!(symbol_by_squares(G::I, g(1, 2)), -1);
        assert!(quad_symbol(G::ONE, g(1, 1)).is_err());
        assert!(quad_symbol(G::ONE, G::ZERO).is_err());
    }

    #[test]
    fn euler_matches_exhaustive_squares() {
        let primes: Vec<G> = enumerate(NormRange::new(2, 120).unwrap())
            .into_iter()
            .filter(|z| z.re > 0 && z.im >= 0 && z.is_odd())
            .filter(|&z| factor(z).unwrap().factors == vec![(z, 1)])
            .collect();
        for p in primes {
            for d in enumerate(NormRange::new(0, 30).unwrap()) {
                assert_eq!(euler_symbol(d, p).unwrap(), symbol_by_squares(d, p), "d={d} p={p}");
            }
        }
    }

    #[test]
    fn unit_changes_the_character() {
        // (i/p) = 1 iff N(p) ≡ 1 mod 8
        assert_eq!(quad_symbol(G::I, g(3, 0)).unwrap(), 1);
        assert_eq!(quad_symbol(G::I, g(2, 1)).unwrap(), -1);
        assert_eq!(quad_symbol(G::I, g(4, 1)).unwrap(), 1);
    }

    #[test]
    fn decomposition_examples() {
        let dec = fundamental_decomposition(g(5, 0)).unwrap();
        assert_eq!((dec.d, dec.ell), (g(5, 0), G::ONE));
        let dec = fundamental_decomposition(g(9 * 5, 9 * 2)).unwrap(); // 9·(5+2i)
        assert_eq!(dec.ell, g(3, 0));
        assert_eq!(dec.d, g(5, 2));
        assert!(matches!(fundamental_decomposition(g(-4, 0)), Err(Error::Degenerate(_))));
        assert!(matches!(fundamental_decomposition(G::ZERO), Err(Error::Degenerate(_))));
    }

    #[test]
    fn conductor_matches_exhaustive_scan() {
        for delta in enumerate(NormRange::new(0, 40).unwrap()) {
            if is_perfect_square(delta).unwrap() {
                continue;
            }
            let fast = conductor_of_disc(delta).unwrap();
            let slow = conductor_exhaustive(delta).unwrap();
            assert_eq!(fast, slow, "delta = {delta}");
        }
    }

    #[test]
    fn conductor_divides_four_delta() {
        let delta = g(1, 2);
        let c = conductor_of_disc(delta).unwrap();
        assert!(c.divides(delta * g(4, 0)));
        assert!(matches!(conductor_of_disc(g(-4, 0)), Err(Error::Degenerate(_))));
    }
}
