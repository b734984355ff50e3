//! Rational-integer helpers: modular arithmetic, primality and factoring of
//! norms up to 127 bits.

use num_integer::Integer;

#[inline]
pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if a < (1 << 64) && b < (1 << 64) {
        return (a * b) % m;
    }
    // Double-and-add; only reached for moduli above 2^64.
    let (mut a, mut b, mut r) = (a % m, b % m, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            r = add_mod(r, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    r
}

#[inline]
fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    let (s, over) = a.overflowing_add(b);
    if over || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

pub fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u128;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

#[inline]
pub fn pow_mod_u64(b: u64, e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    let mut b = b % m;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Miller-Rabin. Deterministic below 3.3e24 with these bases, which covers
/// every norm the laboratory produces in practice; above that it is a strong
/// probable-prime test.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u128) -> u128 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u128;
    loop {
        // Brent's cycle detection with batched gcds.
        let f = |x: u128| add_mod(mul_mod(x, x, n), c, n);
        let (mut y, mut r, mut q, mut g) = (2u128, 1u64, 1u128, 1u128);
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let m = 128.min(r - k);
                for _ in 0..m {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Prime factorisation of a rational integer, sorted ascending.
pub fn factor_u128(mut n: u128) -> Vec<(u128, u32)> {
    let mut out: Vec<(u128, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    let push = |p: u128, out: &mut Vec<(u128, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some(e) => e.1 += 1,
        None => out.push((p, 1)),
    };
    // Small trial division (in u64 when possible), then Miller-Rabin and rho.
    let mut d = 2u64;
    while d < 1024 && (d as u128) * (d as u128) <= n {
        if n < (1 << 64) {
            let mut m = n as u64;
            while m.is_multiple_of(d) {
                push(d as u128, &mut out);
                m /= d;
            }
            n = m as u128;
        } else {
            while n.is_multiple_of(d as u128) {
                push(d as u128, &mut out);
                n /= d as u128;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![];
    if n > 1 {
        stack.push(n);
    }
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push(m, &mut out);
            continue;
        }
        let f = pollard_rho(m);
        stack.push(f);
        stack.push(m / f);
    }
    out.sort_unstable();
    out
}

/// Smallest-prime-factor sieve on `0..=n`.
pub fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// A square root of -1 modulo a prime p = 1 (mod 4).
pub fn sqrt_minus_one(p: u128) -> u128 {
    debug_assert!(p % 4 == 1);
    let e = (p - 1) / 4;
    let mut c = 2u128;
    loop {
        let t = pow_mod(c, e, p);
        if mul_mod(t, t, p) == p - 1 {
            return t;
        }
        c += 1;
    }
}

/// Legendre symbol (a/p) for an odd prime p, by the binary Jacobi algorithm.
pub fn legendre(a: u64, p: u64) -> i8 {
    let mut a = a % p;
    let mut n = p;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz & 1 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Floor of the square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_matches_trial_division() {
        for n in 1u128..3000 {
            let f = factor_u128(n);
            let prod: u128 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.iter().all(|&(p, _)| is_prime(p)));
        }
    }

    #[test]
    fn factor_large_semiprime() {
        let p = 1_000_000_007u128;
        let q = 998_244_353u128;
        assert_eq!(factor_u128(p * q), vec![(q, 1), (p, 1)]);
        let big = 18_446_744_073_709_551_557u128; // largest prime below 2^64
        assert_eq!(factor_u128(big * 3), vec![(3, 1), (big, 1)]);
    }

    #[test]
    fn legendre_agrees_with_euler() {
        for p in [3u64, 5, 7, 11, 13, 101, 1009] {
            for a in 0..p {
                let e = pow_mod_u64(a, (p - 1) / 2, p);
                let want = if e == 0 { 0 } else if e == 1 { 1 } else { -1 };
                assert_eq!(legendre(a, p), want, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn sqrt_minus_one_squares_to_minus_one() {
        for p in [5u128, 13, 17, 29, 1_000_000_009] {
            let t = sqrt_minus_one(p);
            assert_eq!(mul_mod(t, t, p), p - 1);
        }
    }
}
