use crate::error::{Error, Result};
use crate::gaussian::{gcd, mod_inverse, GaussianInt};
use num_integer::Integer;

/// Default cap on the number of residue classes a single modulus may have.
pub const DEFAULT_CAP: u128 = 1_000_000;

/// A complete residue system for Z[i]/(c) laid out as a Hermite-normal-form
/// rectangle: x + yi with 0 ≤ x < N(c)/g and 0 ≤ y < g, g = gcd(re c, im c).
#[derive(Debug, Clone)]
pub struct ResidueSystem {
    pub modulus: GaussianInt,
    pub representatives: Vec<GaussianInt>,
    /// Indices (into `representatives`) of the invertible classes.
    pub unit_reps: Vec<usize>,
    width: i128,
    height: i128,
    // c·(s + ti) has imaginary part exactly `height`
    shift: (i128, i128),
}

impl ResidueSystem {
    pub fn new(c: GaussianInt) -> Result<Self> {
        Self::with_cap(c, DEFAULT_CAP)
    }

    pub fn with_cap(c: GaussianInt, cap: u128) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::domain("residue system modulo zero"));
        }
        let n = c.norm();
        if n > cap {
            return Err(Error::Resource(format!("modulus {c} has {n} classes, cap is {cap}")));
        }
        let (a, b) = (c.re as i128, c.im as i128);
        let eg = a.extended_gcd(&b);
        let (g, t, s) = if eg.gcd < 0 { (-eg.gcd, -eg.x, -eg.y) } else { (eg.gcd, eg.x, eg.y) };
        // a·t + b·s = g
        let shift = (a * s - b * t, a * t + b * s);
        debug_assert_eq!(shift.1, g);
        let height = g;
        let width = n as i128 / g;
        let mut reps = Vec::with_capacity(n as usize);
        for y in 0..height {
            for x in 0..width {
                reps.push(GaussianInt::new(x as i64, y as i64));
            }
        }
        let unit_reps = if c.is_unit() {
            vec![0]
        } else {
            let mut u = Vec::new();
            for (k, r) in reps.iter().enumerate() {
                if !r.is_zero() && gcd(*r, c)?.is_unit() {
                    u.push(k);
                }
            }
            u
        };
        Ok(Self { modulus: c, representatives: reps, unit_reps, width, height, shift })
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    /// Index of the representative congruent to z.
    pub fn index_of(&self, z: GaussianInt) -> usize {
        let (re, im) = (z.re as i128, z.im as i128);
        let y = im.rem_euclid(self.height);
        let k = (im - y) / self.height;
        let x = (re - k * self.shift.0).rem_euclid(self.width);
        (y * self.width + x) as usize
    }

    /// The representative congruent to z.
    pub fn reduce(&self, z: GaussianInt) -> GaussianInt {
        self.representatives[self.index_of(z)]
    }

    /// Index of the inverse class for every entry of `unit_reps`.
    pub fn inverse_indices(&self) -> Result<Vec<usize>> {
        if self.modulus.is_unit() {
            return Ok(vec![0]);
        }
        self.unit_reps
            .iter()
            .map(|&k| {
                let inv = mod_inverse(self.representatives[k], self.modulus)?
                    .ok_or_else(|| Error::Consistency("unit class without inverse".into()))?;
                Ok(self.index_of(inv))
            })
            .collect()
    }
}
