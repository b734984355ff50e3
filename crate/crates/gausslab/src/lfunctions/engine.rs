//! Shared evaluator for L(1, χ_D) across long sweeps of discriminants.
//!
//! One ideal table and one table of prime kinds serve every character. The
//! smoothing scale is X = clamp(8·N(D), [`L1_SCALE_MIN`], [`L1_SCALE_CAP`]);
//! the Richardson weights for each scale are built once, and values are
//! cached per character. The characters of D, −D, D̄ and −D̄ agree (−1 is a
//! square at every prime of Z[i] and conjugation permutes the ideals), so
//! the four share one cache entry.

use super::{smoothed_cutoff, t_poly_with, LValue};
use crate::characters::{fundamental_decomposition, PrimeSymbolTable};
use crate::error::{Error, Result};
use crate::gaussian::{GaussianInt, IdealTable};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

type G = GaussianInt;

pub const L1_SCALE_CAP: f64 = 4096.0;
pub const L1_SCALE_MIN: f64 = 64.0;
pub const L1_TOLERANCE: f64 = 1e-6;

struct Weights {
    len: usize,
    primes: usize,
    /// 2·w(2X) − w(X), with w(X) = exp(−N/X)/N
    combo: Vec<f64>,
    /// w(2X) − w(X)
    diff: Vec<f64>,
    tail: f64,
}

pub struct L1Engine {
    table: IdealTable,
    symbols: PrimeSymbolTable,
    cap: f64,
    tol: f64,
    weights: Mutex<HashMap<u64, Arc<Weights>>>,
    cache: RwLock<HashMap<(G, i8), LValue>>,
}

impl std::fmt::Debug for L1Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("L1Engine").field("bound", &self.table.bound()).field("cap", &self.cap).finish()
    }
}

impl L1Engine {
    pub fn new(cap: f64, tol: f64) -> Result<Self> {
        if !(cap >= L1_SCALE_MIN) {
            return Err(Error::domain(format!("scale cap must be at least {L1_SCALE_MIN}")));
        }
        let table = IdealTable::new(2 * smoothed_cutoff(cap, tol)?)?;
        let symbols = PrimeSymbolTable::new(&table);
        Ok(Self {
            table,
            symbols,
            cap,
            tol,
            weights: Mutex::new(HashMap::new()),
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// The process-wide engine with the default cap and tolerance.
    pub fn global() -> &'static L1Engine {
        static ENGINE: OnceLock<L1Engine> = OnceLock::new();
        ENGINE.get_or_init(|| L1Engine::new(L1_SCALE_CAP, L1_TOLERANCE).expect("default L1 engine"))
    }

    pub fn scale_for(&self, norm_d: u128) -> f64 {
        (8.0 * norm_d as f64).clamp(L1_SCALE_MIN, self.cap)
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().map(|m| m.len()).unwrap_or(0)
    }

    fn weights(&self, x: f64) -> Result<Arc<Weights>> {
        let key = x.to_bits();
        if let Some(w) = self.weights.lock().expect("weights").get(&key) {
            return Ok(w.clone());
        }
        let c1 = smoothed_cutoff(x, self.tol)?;
        let n1 = self.table.count_up_to(c1);
        let len = self.table.count_up_to(2 * c1);
        let norms = self.table.norms();
        let mut combo = Vec::with_capacity(len);
        let mut diff = Vec::with_capacity(len);
        for (k, &n) in norms[..len].iter().enumerate() {
            let nf = n as f64;
            let w2 = (-nf / (2.0 * x)).exp() / nf;
            let w1 = if k < n1 { (-nf / x).exp() / nf } else { 0.0 };
            combo.push(2.0 * w2 - w1);
            diff.push(w2 - w1);
        }
        let primes = self.table.primes().partition_point(|&p| (p as usize) < len);
        let c = c1 as f64;
        let tail = PI / 4.0 * (x * (-c / x).exp() / c + 2.0 * x * (-c / x).exp() / (2.0 * c));
        let w = Arc::new(Weights { len, primes, combo, diff, tail });
        self.weights.lock().expect("weights").insert(key, w.clone());
        Ok(w)
    }

    /// L(1, χ) for the character with generator `gen` and value `chi_two`
    /// at 1+i, in the ideal normalization.
    pub fn character_l1(&self, gen: G, chi_two: i8) -> Result<LValue> {
        if gen == G::ONE || gen == -G::ONE {
            return Err(Error::Pole("trivial character at s = 1".into()));
        }
        let key = [gen, -gen, gen.conj(), -gen.conj()].into_iter().min().expect("nonempty");
        if let Some(&v) = self.cache.read().expect("L1 cache").get(&(key, chi_two)) {
            return Ok(v);
        }
        let x = self.scale_for(gen.norm());
        let w = self.weights(x)?;
        let pv = self.symbols.values_prefix(gen, chi_two, w.primes);
        let signs = self.table.completely_multiplicative_sign_prefix(&pv, w.len);
        let (mut v, mut d) = (0.0, 0.0);
        for k in 0..w.len {
            let s = signs[k] as f64;
            v += s * w.combo[k];
            d += s * w.diff[k];
        }
        let out = LValue { value: Complex64::new(v, 0.0), error: d.abs() + w.tail };
        self.cache.write().expect("L1 cache").insert((key, chi_two), out);
        Ok(out)
    }

    /// L(1, δ) = T_ℓ(1)·L(1, χ_D).
    pub fn l1_disc(&self, delta: G) -> Result<f64> {
        let dec = fundamental_decomposition(delta)?;
        let gen = dec.generator();
        let l = self.character_l1(gen, dec.chi_two)?;
        let t = t_poly_with(dec.ell, gen, dec.chi_two, Complex64::new(1.0, 0.0))?;
        let v = t * l.value;
        if v.im.abs() > 1e-9 {
            return Err(Error::Consistency(format!("L(1, {delta}) has imaginary part {}", v.im)));
        }
        Ok(v.re)
    }
}
