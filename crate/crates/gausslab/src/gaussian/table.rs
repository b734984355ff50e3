use super::{intmath, GaussianInt};
use crate::error::{Error, Result};

/// All canonical ideal generators with norm ≤ bound, sorted by (norm, re),
/// with one prime-power split per entry so that multiplicative functions can
/// be tabulated in a single pass.
///
/// Entry `k` is written as p^e · m with p prime, p ∤ m; `prime_of[k]` and
/// `cofactor[k]` index back into the table. Entry 0 is the unit 1.
#[derive(Debug, Clone)]
pub struct IdealTable {
    bound: u64,
    side: usize,
    reps: Vec<GaussianInt>,
    norms: Vec<u64>,
    grid: Vec<u32>,
    prime_of: Vec<u32>,
    prime_exp: Vec<u8>,
    cofactor: Vec<u32>,
    primes: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl IdealTable {
    /// Largest supported bound; the grid and sieve are linear in it.
    pub const MAX_BOUND: u64 = 50_000_000;

    pub fn new(bound: u64) -> Result<Self> {
        if bound > Self::MAX_BOUND {
            return Err(Error::Resource(format!(
                "ideal table bound {bound} exceeds {}",
                Self::MAX_BOUND
            )));
        }
        let side = intmath::isqrt(bound as u128) as usize;
        let mut reps = Vec::new();
        for a in 1..=side as i64 {
            for b in 0..=side as i64 {
                if (a * a + b * b) as u64 <= bound {
                    reps.push(GaussianInt::new(a, b));
                }
            }
        }
        reps.sort_by_key(|z| (z.norm(), z.re));
        let norms: Vec<u64> = reps.iter().map(|z| z.norm() as u64).collect();
        let mut grid = vec![NONE; (side + 1) * (side + 1)];
        for (k, z) in reps.iter().enumerate() {
            grid[z.re as usize * (side + 1) + z.im as usize] = k as u32;
        }
        let n = reps.len();
        let mut t = Self {
            bound,
            side,
            reps,
            norms,
            grid,
            prime_of: vec![NONE; n],
            prime_exp: vec![0; n],
            cofactor: vec![NONE; n],
            primes: Vec::new(),
        };
        let spf = intmath::spf_sieve(bound as usize);
        for k in 1..n {
            let z = t.reps[k];
            let q = spf[t.norms[k] as usize] as u64;
            let p = match q % 4 {
                2 => GaussianInt::ONE_PLUS_I,
                3 => GaussianInt::from_int(q as i64),
                _ => {
                    // the two canonical primes of norm q are (a, b) and (b, a)
                    let first = t.reps[t.first_index_of_norm(q)];
                    let other = GaussianInt::new(first.im, first.re);
                    if first.divides(z) {
                        first
                    } else {
                        debug_assert!(other.divides(z));
                        other
                    }
                }
            };
            let mut m = z;
            let mut e = 0u8;
            while p.divides(m) {
                m = m.exact_div(p)?;
                e += 1;
            }
            let m = super::canon(m)?;
            let pi = t.index_of(p).expect("prime below bound");
            t.prime_of[k] = pi as u32;
            t.prime_exp[k] = e;
            t.cofactor[k] = t.index_of(m).expect("cofactor below bound") as u32;
            if m == GaussianInt::ONE && e == 1 {
                t.primes.push(k as u32);
            }
        }
        Ok(t)
    }

    fn first_index_of_norm(&self, q: u64) -> usize {
        self.norms.partition_point(|&x| x < q)
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[GaussianInt] {
        &self.reps
    }

    pub fn norms(&self) -> &[u64] {
        &self.norms
    }

    /// Table indices of the prime ideals, in table order.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Index of a canonical generator, if it lies in the table.
    pub fn index_of(&self, z: GaussianInt) -> Option<usize> {
        if z.re < 1 || z.im < 0 || z.re as usize > self.side || z.im as usize > self.side {
            return None;
        }
        match self.grid[z.re as usize * (self.side + 1) + z.im as usize] {
            NONE => None,
            k => Some(k as usize),
        }
    }

    /// Number of entries with norm ≤ x.
    pub fn count_up_to(&self, x: u64) -> usize {
        self.norms.partition_point(|&n| n <= x)
    }

    /// (prime index, exponent, cofactor index) for entry k > 0.
    pub fn split(&self, k: usize) -> (usize, u32, usize) {
        (self.prime_of[k] as usize, self.prime_exp[k] as u32, self.cofactor[k] as usize)
    }

    /// Tabulate a multiplicative function from its prime-power values.
    ///
    /// `local(p, e)` receives the table index of the prime and the exponent.
    pub fn multiplicative<T, F>(&self, one: T, mut local: F) -> Vec<T>
    where
        T: Copy + std::ops::Mul<Output = T>,
        F: FnMut(usize, u32) -> T,
    {
        let mut out = Vec::with_capacity(self.len());
        if self.is_empty() {
            return out;
        }
        out.push(one);
        for k in 1..self.len() {
            let (p, e, m) = self.split(k);
            let v = local(p, e) * out[m];
            out.push(v);
        }
        out
    }

    /// Tabulate a completely multiplicative function with values in {-1, 0, 1}
    /// from its values on the primes (indexed like [`IdealTable::primes`]).
    pub fn completely_multiplicative_sign(&self, prime_values: &[i8]) -> Vec<i8> {
        self.completely_multiplicative_sign_prefix(prime_values, self.len())
    }

    /// As [`IdealTable::completely_multiplicative_sign`] on the first `len`
    /// entries only. Prime values are needed for the primes among them.
    pub fn completely_multiplicative_sign_prefix(&self, prime_values: &[i8], len: usize) -> Vec<i8> {
        let len = len.min(self.len());
        let mut at_prime = vec![0i8; len];
        for (j, &p) in self.primes.iter().enumerate() {
            if p as usize >= len {
                break;
            }
            at_prime[p as usize] = prime_values[j];
        }
        let mut out = vec![0i8; len];
        if len == 0 {
            return out;
        }
        out[0] = 1;
        for k in 1..len {
            let (p, e, m) = self.split(k);
            let c = at_prime[p];
            let pe = if e % 2 == 0 { c * c } else { c };
            out[k] = pe * out[m];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{factor, mobius};

    #[test]
    fn table_splits_reassemble() {
        let t = IdealTable::new(2000).unwrap();
        assert_eq!(t.reps()[0], GaussianInt::ONE);
        for k in 1..t.len() {
            let (p, e, m) = t.split(k);
            let z = t.reps()[p].checked_pow(e).unwrap() * t.reps()[m];
            assert_eq!(crate::gaussian::canon(z).unwrap(), t.reps()[k]);
        }
        // number of canonical ideals is the Gauss count of nonzero points over 4
        let total = crate::gaussian::count_in_range(crate::gaussian::NormRange::new(0, 2000).unwrap());
        assert_eq!(4 * t.len() as u64, total);
    }

    #[test]
    fn multiplicative_matches_factor() {
        let t = IdealTable::new(3000).unwrap();
        let mu = t.multiplicative(1i32, |_, e| if e == 1 { -1 } else { 0 });
        for (k, &z) in t.reps().iter().enumerate() {
            assert_eq!(mu[k] as i8, mobius(z).unwrap());
        }
        let primes: Vec<_> = t.primes().iter().map(|&p| t.reps()[p as usize]).collect();
        for p in &primes {
            assert_eq!(factor(*p).unwrap().factors.len(), 1);
        }
    }
}
