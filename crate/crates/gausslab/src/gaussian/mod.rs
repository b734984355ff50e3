//! Exact arithmetic in the Gaussian integers.

pub mod intmath;
mod table;

pub use table::IdealTable;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// An element a + bi of Z[i] with 63-bit components, so norms fit in 127 bits.
///
/// Checked methods return [`Error::Overflow`]; the operator impls panic on
/// overflow instead of wrapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

pub const UNITS: [GaussianInt; 4] = [
    GaussianInt { re: 1, im: 0 },
    GaussianInt { re: 0, im: 1 },
    GaussianInt { re: -1, im: 0 },
    GaussianInt { re: 0, im: -1 },
];

fn fit(v: i128, what: &'static str) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow(what))
}

/// Round-half-up division used for Euclidean quotients.
fn div_round(n: i128, d: i128) -> i128 {
    debug_assert!(d > 0);
    (2 * n + d).div_euclid(2 * d)
}

impl GaussianInt {
    pub const ZERO: Self = Self { re: 0, im: 0 };
    pub const ONE: Self = Self { re: 1, im: 0 };
    pub const I: Self = Self { re: 0, im: 1 };
    /// The ramified prime above 2.
    pub const ONE_PLUS_I: Self = Self { re: 1, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    pub const fn from_int(re: i64) -> Self {
        Self { re, im: 0 }
    }

    pub fn norm(self) -> u128 {
        let a = self.re.unsigned_abs() as u128;
        let b = self.im.unsigned_abs() as u128;
        a * a + b * b
    }

    /// Norm as u64; errors when it does not fit.
    pub fn norm_u64(self) -> Result<u64> {
        u64::try_from(self.norm()).map_err(|_| Error::Overflow("norm"))
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(self) -> bool {
        self.norm() == 1
    }

    /// Coprime to 1+i, i.e. re + im odd.
    pub fn is_odd(self) -> bool {
        (self.re ^ self.im) & 1 == 1
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn checked_neg(self) -> Result<Self> {
        Ok(Self::new(
            self.re.checked_neg().ok_or(Error::Overflow("negation"))?,
            self.im.checked_neg().ok_or(Error::Overflow("negation"))?,
        ))
    }

    pub fn checked_add(self, o: Self) -> Result<Self> {
        Ok(Self::new(
            self.re.checked_add(o.re).ok_or(Error::Overflow("addition"))?,
            self.im.checked_add(o.im).ok_or(Error::Overflow("addition"))?,
        ))
    }

    pub fn checked_sub(self, o: Self) -> Result<Self> {
        Ok(Self::new(
            self.re.checked_sub(o.re).ok_or(Error::Overflow("subtraction"))?,
            self.im.checked_sub(o.im).ok_or(Error::Overflow("subtraction"))?,
        ))
    }

    fn wide_mul(self, o: Self) -> Result<(i128, i128)> {
        let (a, b, c, d) = (self.re as i128, self.im as i128, o.re as i128, o.im as i128);
        let re = (a * c).checked_sub(b * d).ok_or(Error::Overflow("multiplication"))?;
        let im = (a * d).checked_add(b * c).ok_or(Error::Overflow("multiplication"))?;
        Ok((re, im))
    }

    pub fn checked_mul(self, o: Self) -> Result<Self> {
        let (re, im) = self.wide_mul(o)?;
        Ok(Self::new(fit(re, "multiplication")?, fit(im, "multiplication")?))
    }

    pub fn checked_pow(self, k: u32) -> Result<Self> {
        let mut r = Self::ONE;
        for _ in 0..k {
            r = r.checked_mul(self)?;
        }
        Ok(r)
    }

    pub fn mul_int(self, k: i64) -> Result<Self> {
        self.checked_mul(Self::from_int(k))
    }

    /// Euclidean division with rounded quotient: self = q·d + r, N(r) ≤ N(d)/2.
    pub fn div_rem(self, d: Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        let (nr, ni) = self.wide_mul(d.conj())?;
        let n = i128::try_from(d.norm()).map_err(|_| Error::Overflow("division"))?;
        let q = Self::new(fit(div_round(nr, n), "division")?, fit(div_round(ni, n), "division")?);
        let (qr, qi) = q.wide_mul(d)?;
        let r = Self::new(
            fit(self.re as i128 - qr, "division")?,
            fit(self.im as i128 - qi, "division")?,
        );
        Ok((q, r))
    }

    /// Whether `self` divides `z`.
    pub fn divides(self, z: Self) -> bool {
        if self.is_zero() {
            return z.is_zero();
        }
        // z·conj(self) must be divisible by N(self) componentwise.
        match (z.wide_mul(self.conj()), i128::try_from(self.norm())) {
            (Ok((re, im)), Ok(n)) => re % n == 0 && im % n == 0,
            _ => z.div_rem(self).map(|(_, r)| r.is_zero()).unwrap_or(false),
        }
    }

    /// Exact quotient; errors if `d` does not divide `self`.
    pub fn exact_div(self, d: Self) -> Result<Self> {
        let (q, r) = self.div_rem(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::domain(format!("{d} does not divide {self}")))
        }
    }

    /// Remainder of the rounded Euclidean division.
    pub fn rem(self, m: Self) -> Result<Self> {
        Ok(self.div_rem(m)?.1)
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => match b {
                1 => write!(f, "i"),
                -1 => write!(f, "-i"),
                _ => write!(f, "{b}i"),
            },
            (a, 1) => write!(f, "{a}+i"),
            (a, -1) => write!(f, "{a}-i"),
            (a, b) if b > 0 => write!(f, "{a}+{b}i"),
            (a, b) => write!(f, "{a}{b}i"),
        }
    }
}

impl std::str::FromStr for GaussianInt {
    type Err = Error;

    /// Accepts forms such as `3`, `-2i`, `1+2i`, `4-i`, `i`, `(1,2)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { line: None, msg: format!("not a Gaussian integer: {s:?}") };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(inner) = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            return Ok(Self::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?));
        }
        if t.is_empty() {
            return Err(bad());
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Self::from_int(t.parse().map_err(|_| bad())?));
        };
        // split at the last sign that is not the leading one
        let split = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(k, _)| k).last();
        let (re_s, im_s) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im_s {
            "" | "+" => 1,
            "-" => -1,
            x => x.parse().map_err(|_| bad())?,
        };
        Ok(Self::new(re_s.parse().map_err(|_| bad())?, im))
    }
}

macro_rules! panicking_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl std::ops::$tr for GaussianInt {
            type Output = GaussianInt;
            fn $m(self, o: Self) -> Self {
                match self.$checked(o) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
    };
}
panicking_op!(Add, add, checked_add);
panicking_op!(Sub, sub, checked_sub);
panicking_op!(Mul, mul, checked_mul);

impl std::ops::Neg for GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> Self {
        self.checked_neg().unwrap_or_else(|e| panic!("{e}"))
    }
}

/// Norm of z.
pub fn norm(z: GaussianInt) -> u128 {
    z.norm()
}

/// Returns (u, rep) with rep = u·z in the half-open first quadrant
/// {re > 0, im ≥ 0}.
pub fn canonical_associate(z: GaussianInt) -> Result<(GaussianInt, GaussianInt)> {
    if z.is_zero() {
        return Err(Error::domain("zero has no canonical associate"));
    }
    for u in UNITS {
        let w = u.checked_mul(z)?;
        if w.re > 0 && w.im >= 0 {
            return Ok((u, w));
        }
    }
    unreachable!("one associate always lies in the first quadrant")
}

/// Canonical associate only.
pub fn canon(z: GaussianInt) -> Result<GaussianInt> {
    Ok(canonical_associate(z)?.1)
}

/// Inverse of a unit.
pub fn unit_inverse(u: GaussianInt) -> GaussianInt {
    u.conj()
}

/// Canonical generator of the ideal (a, b).
pub fn gcd(a: GaussianInt, b: GaussianInt) -> Result<GaussianInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::domain("gcd(0, 0) is undefined"));
    }
    let (mut x, mut y) = (a, b);
    while !y.is_zero() {
        let r = x.rem(y)?;
        x = y;
        y = r;
    }
    canon(x)
}

/// Extended Euclid: returns (g, s, t) with s·a + t·b = g (g not normalised).
pub fn ext_gcd(a: GaussianInt, b: GaussianInt) -> Result<(GaussianInt, GaussianInt, GaussianInt)> {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (GaussianInt::ONE, GaussianInt::ZERO);
    let (mut t0, mut t1) = (GaussianInt::ZERO, GaussianInt::ONE);
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(r1)?;
        r0 = r1;
        r1 = r;
        let s = s0.checked_sub(q.checked_mul(s1)?)?;
        s0 = s1;
        s1 = s;
        let t = t0.checked_sub(q.checked_mul(t1)?)?;
        t0 = t1;
        t1 = t;
    }
    Ok((r0, s0, t0))
}

/// Inverse of a modulo c, if a is a unit mod c.
pub fn mod_inverse(a: GaussianInt, c: GaussianInt) -> Result<Option<GaussianInt>> {
    if c.is_unit() {
        return Ok(Some(GaussianInt::ZERO));
    }
    let (g, s, _) = ext_gcd(a, c)?;
    if !g.is_unit() {
        return Ok(None);
    }
    // s·a ≡ g (mod c), so a⁻¹ = s·g⁻¹.
    Ok(Some(s.checked_mul(unit_inverse(g))?.rem(c)?))
}

/// Unit times a list of canonical primes with exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub unit: GaussianInt,
    pub factors: Vec<(GaussianInt, u32)>,
}

impl Factorization {
    /// Reassemble unit·Π pᵉ.
    pub fn product(&self) -> Result<GaussianInt> {
        let mut z = self.unit;
        for &(p, e) in &self.factors {
            z = z.checked_mul(p.checked_pow(e)?)?;
        }
        Ok(z)
    }

    pub fn exponent_of(&self, p: GaussianInt) -> u32 {
        self.factors.iter().find(|(q, _)| *q == p).map(|x| x.1).unwrap_or(0)
    }

    pub fn mobius(&self) -> i8 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn totient(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| {
                let q = p.norm();
                q.pow(e - 1) * (q - 1)
            })
            .product()
    }

    pub fn tau(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    /// σ_ξ(z) = Σ_{d|z} N(d)^ξ over ideal divisors.
    pub fn sigma(&self, xi: f64) -> f64 {
        self.factors
            .iter()
            .map(|&(p, e)| {
                let q = (p.norm() as f64).powf(xi);
                (0..=e).map(|k| q.powi(k as i32)).sum::<f64>()
            })
            .product()
    }

    /// σ_ξ with complex exponent, as Σ exp(ξ·log N(d)).
    pub fn sigma_complex(&self, xi: num_complex::Complex64) -> num_complex::Complex64 {
        self.factors
            .iter()
            .map(|&(p, e)| {
                let l = (p.norm() as f64).ln();
                (0..=e).map(|k| (xi * (k as f64 * l)).exp()).sum::<num_complex::Complex64>()
            })
            .product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e <= 1)
    }

    /// Canonical c⋆, maximal with c⋆² | z.
    pub fn square_part(&self) -> Result<GaussianInt> {
        let mut z = GaussianInt::ONE;
        for &(p, e) in &self.factors {
            z = z.checked_mul(p.checked_pow(e / 2)?)?;
        }
        canon(z)
    }

    /// All canonical divisors, sorted by norm then real part.
    pub fn divisors(&self) -> Result<Vec<GaussianInt>> {
        let mut out = vec![GaussianInt::ONE];
        for &(p, e) in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for &d in &out {
                let mut pk = GaussianInt::ONE;
                for _ in 0..=e {
                    next.push(canon(d.checked_mul(pk)?)?);
                    pk = pk.checked_mul(p)?;
                }
            }
            out = next;
        }
        sort_canonical(&mut out);
        Ok(out)
    }
}

/// Sort by norm, then real part.
pub fn sort_canonical(v: &mut [GaussianInt]) {
    v.sort_by(|a, b| a.norm().cmp(&b.norm()).then(a.re.cmp(&b.re)).then(a.im.cmp(&b.im)));
}

/// The Gaussian primes above a rational prime q, canonical and sorted.
pub fn primes_above(q: u128) -> Result<Vec<GaussianInt>> {
    if q == 2 {
        return Ok(vec![GaussianInt::ONE_PLUS_I]);
    }
    if q % 4 == 3 {
        let v = i64::try_from(q).map_err(|_| Error::Overflow("inert prime"))?;
        return Ok(vec![GaussianInt::from_int(v)]);
    }
    let t = intmath::sqrt_minus_one(q);
    let qi = i64::try_from(q).map_err(|_| Error::Overflow("split prime"))?;
    let ti = i64::try_from(t).map_err(|_| Error::Overflow("split prime"))?;
    let pi = gcd(GaussianInt::from_int(qi), GaussianInt::new(ti, 1))?;
    let mut v = vec![pi, canon(pi.conj())?];
    sort_canonical(&mut v);
    Ok(v)
}

/// Prime factorisation through the norm. Primes are sorted by norm then re.
pub fn factor(z: GaussianInt) -> Result<Factorization> {
    if z.is_zero() {
        return Err(Error::domain("cannot factor zero"));
    }
    let mut rest = z;
    let mut factors = Vec::new();
    for (q, e) in intmath::factor_u128(z.norm()) {
        if q == 2 {
            let p = GaussianInt::ONE_PLUS_I;
            for _ in 0..e {
                rest = rest.exact_div(p)?;
            }
            factors.push((p, e));
        } else if q % 4 == 3 {
            let p = primes_above(q)?[0];
            for _ in 0..e / 2 {
                rest = rest.exact_div(p)?;
            }
            factors.push((p, e / 2));
        } else {
            for p in primes_above(q)? {
                let mut k = 0;
                while k < e && p.divides(rest) {
                    rest = rest.exact_div(p)?;
                    k += 1;
                }
                if k > 0 {
                    factors.push((p, k));
                }
            }
        }
    }
    debug_assert!(rest.is_unit());
    factors.sort_by(|a, b| a.0.norm().cmp(&b.0.norm()).then(a.0.re.cmp(&b.0.re)));
    Ok(Factorization { unit: rest, factors })
}

pub fn mobius(z: GaussianInt) -> Result<i8> {
    Ok(factor(z)?.mobius())
}

pub fn totient(z: GaussianInt) -> Result<u128> {
    Ok(factor(z)?.totient())
}

pub fn tau(z: GaussianInt) -> Result<u64> {
    Ok(factor(z)?.tau())
}

pub fn sigma(z: GaussianInt, xi: f64) -> Result<f64> {
    Ok(factor(z)?.sigma(xi))
}

pub fn is_squarefree(z: GaussianInt) -> Result<bool> {
    Ok(factor(z)?.is_squarefree())
}

pub fn square_part(z: GaussianInt) -> Result<GaussianInt> {
    factor(z)?.square_part()
}

pub fn divisors(z: GaussianInt) -> Result<Vec<GaussianInt>> {
    factor(z)?.divisors()
}

/// Half-open norm annulus lo < N(n) ≤ hi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormRange {
    pub lo: u64,
    pub hi: u64,
}

impl NormRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("empty norm range ({lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, z: GaussianInt) -> bool {
        let n = z.norm();
        (self.lo as u128) < n && n <= self.hi as u128
    }
}

/// Visit every element of the annulus in row order (re ascending, then im).
pub fn for_each_in_range(range: NormRange, mut f: impl FnMut(GaussianInt)) {
    let r = intmath::isqrt(range.hi as u128) as i64;
    let (lo, hi) = (range.lo as i128, range.hi as i128);
    for a in -r..=r {
        let a2 = (a as i128) * (a as i128);
        let bmax = intmath::isqrt((hi - a2) as u128) as i64;
        // |b| ≤ bmin lies inside the excluded disc N ≤ lo
        let bmin = if lo >= a2 { intmath::isqrt((lo - a2) as u128) as i64 } else { -1 };
        if bmin < 0 {
            for b in -bmax..=bmax {
                f(GaussianInt::new(a, b));
            }
        } else {
            for b in (-bmax..-bmin).chain(bmin + 1..=bmax) {
                f(GaussianInt::new(a, b));
            }
        }
    }
}

/// Every element of the annulus (all four associates), sorted by norm, then
/// re, then im.
pub fn enumerate(range: NormRange) -> Vec<GaussianInt> {
    let mut v = Vec::new();
    for_each_in_range(range, |z| v.push(z));
    sort_canonical(&mut v);
    v
}

/// Number of lattice points with lo < N(n) ≤ hi.
pub fn count_in_range(range: NormRange) -> u64 {
    let mut c = 0;
    for_each_in_range(range, |_| c += 1);
    c
}
