//! A self-check over every canonical modulus up to a norm bound: the exact
//! identities between S, ρ and λ, and the two floating-point ones.

use super::{
    kloosterman_sum, kloosterman_via_rho, lambda, lambda_prime_power, rho_disc, rho_from_lambda, rho_table,
    selberg_kuznetsov_check, weil_gundlach_margin, ResidueSystem,
};
use crate::characters::fundamental_decomposition;
use crate::error::Result;
use crate::gaussian::{factor, totient, GaussianInt, IdealTable};
use crate::par::{self, Exec};
use crate::rng;
use rand::Rng;
use serde::Serialize;

type G = GaussianInt;

/// The quadratic checks (ρ(c,a) = ρ_c(a²−4), the ρ ↔ λ round trip and the
/// Selberg–Kuznetsov identity) stop at this norm; they cost N(c) each.
pub const QUADRATIC_NORM_CAP: u64 = 100;

/// Tolerance for the two identities checked in floating point.
pub const FLOAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    /// Largest residual for the floating-point checks, 0 for the exact ones.
    pub worst: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn g(a: i64, b: i64) -> G {
    G::new(a, b)
}

#[derive(Default)]
struct PerModulus {
    sum_cases: u64,
    sum_fail: u64,
    quad_cases: u64,
    quad_fail: u64,
    trip_cases: u64,
    trip_fail: u64,
    pp_cases: u64,
    pp_fail: u64,
    sk_cases: u64,
    sk_worst: f64,
    wg_cases: u64,
    wg_worst: f64,
}

fn check_modulus(c: G, quad_cap: u64) -> Result<PerModulus> {
    let four = G::from_int(4);
    let ns = [g(3, 0), g(1, 2), g(5, 1), g(2, 3), g(7, 0), g(4, 5), g(6, 1), g(9, 2)];
    let mut out = PerModulus::default();
    let rs = ResidueSystem::new(c)?;
    let t = rho_table(&rs)?;
    out.sum_cases = 1;
    out.sum_fail = u64::from(t.iter().map(|&v| v as u128).sum::<u128>() != totient(c)?);

    let quadratic = c.norm() <= quad_cap as u128;
    if quadratic {
        for (k, &a) in rs.representatives.iter().enumerate() {
            out.quad_cases += 1;
            out.quad_fail += u64::from(t[k] as u64 != rho_disc(c, a * a - four)?);
        }
        for &n in &ns {
            let delta = n * n - four;
            out.trip_cases += 1;
            out.trip_fail += u64::from(rho_from_lambda(c, delta)? != rho_disc(c, delta)? as i64);
        }
        for &z in [g(1, 0), g(1, 1), g(2, 0), g(3, 0), g(2, 1), g(6, 0), g(4, 2), g(0, 5), c, c * g(1, 1)].iter() {
            out.sk_cases += 1;
            out.sk_worst = out.sk_worst.max(selberg_kuznetsov_check(z, c)?);
        }
    }

    let f = factor(c)?;
    if f.factors.len() == 1 && f.factors[0].0.is_odd() {
        let (p, k) = f.factors[0];
        for &n in &ns {
            let delta = n * n - four;
            let dec = fundamental_decomposition(delta)?;
            out.pp_cases += 1;
            out.pp_fail += u64::from(lambda(c, delta)? as i128 != lambda_prime_power(p, k, delta, &dec)?);
        }
    }

    let ms = [g(1, 0), g(0, 1), g(1, 1), g(2, 1), g(3, 0), g(0, 0)];
    for &m in &ms {
        for &n in &ms {
            out.wg_cases += 1;
            out.wg_worst = out.wg_worst.max(weil_gundlach_margin(m, n, c)?);
        }
    }
    Ok(out)
}

/// Runs every identity over the canonical moduli with N(c) ≤ `max_norm`.
/// The 200 random (n, c) pairs for the Kloosterman-via-ρ check come from the
/// `identities` stream of `seed`.
pub fn identity_suite(exec: Exec, max_norm: u64, seed: u64) -> Result<Vec<IdentityCheck>> {
    let moduli = IdealTable::new(max_norm)?.reps().to_vec();
    let per = par::try_map(exec, &moduli, |&c| check_modulus(c, QUADRATIC_NORM_CAP))?;
    let total = |f: fn(&PerModulus) -> u64| per.iter().map(f).sum::<u64>();
    let worst = |f: fn(&PerModulus) -> f64| per.iter().map(f).fold(0.0, f64::max);

    let mut stream = rng::stream(seed, "identities");
    let pairs: Vec<(G, G)> = (0..200)
        .map(|_| {
            let c = moduli[stream.gen_range(0..moduli.len())];
            (g(stream.gen_range(-60..=60), stream.gen_range(-60..=60)), c)
        })
        .collect();
    let diffs = par::try_map(exec, &pairs, |&(n, c)| -> Result<f64> {
        Ok((kloosterman_sum(n, n, c)? - kloosterman_via_rho(n, c)?).norm())
    })?;
    let rho_worst = diffs.iter().copied().fold(0.0, f64::max);
    let sk_worst = worst(|p| p.sk_worst);
    let wg_worst = worst(|p| p.wg_worst);

    Ok(vec![
        IdentityCheck { name: "sum_rho_is_totient", cases: total(|p| p.sum_cases), failures: total(|p| p.sum_fail), worst: 0.0 },
        IdentityCheck { name: "rho_is_rho_disc", cases: total(|p| p.quad_cases), failures: total(|p| p.quad_fail), worst: 0.0 },
        IdentityCheck { name: "rho_lambda_round_trip", cases: total(|p| p.trip_cases), failures: total(|p| p.trip_fail), worst: 0.0 },
        IdentityCheck { name: "lambda_prime_power", cases: total(|p| p.pp_cases), failures: total(|p| p.pp_fail), worst: 0.0 },
        IdentityCheck {
            name: "kloosterman_via_rho",
            cases: pairs.len() as u64,
            failures: diffs.iter().filter(|&&d| d >= FLOAT_TOL).count() as u64,
            worst: rho_worst,
        },
        IdentityCheck {
            name: "selberg_kuznetsov",
            cases: total(|p| p.sk_cases),
            failures: u64::from(sk_worst >= FLOAT_TOL),
            worst: sk_worst,
        },
        IdentityCheck {
            name: "weil_gundlach_bound",
            cases: total(|p| p.wg_cases),
            failures: u64::from(wg_worst > 1.0 + 1e-12),
            worst: wg_worst,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_reproducible() {
        let a = identity_suite(Exec::Parallel, 30, 1).unwrap();
        let b = identity_suite(Exec::Sequential, 30, 1).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(IdentityCheck::passed), "{a:?}");
        assert!(a.iter().all(|c| c.cases > 0));
    }
}
