use super::{euler_symbol, QuadraticCharacter};
use crate::error::{Error, Result};
use crate::gaussian::{factor, for_each_in_range, GaussianInt, IdealTable, NormRange};
use crate::par::{self, Exec};
use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;

type G = GaussianInt;

fn annulus(x: f64, y: f64) -> Result<NormRange> {
    if !(x == 0.0 || (1.0 <= y && y <= x)) || y < 0.0 {
        return Err(Error::domain(format!("short sum needs 1 ≤ y ≤ x or x = 0 (x={x}, y={y})")));
    }
    NormRange::new(x.floor() as u64, (x + y).floor() as u64)
}

/// Σ_{x < N(n) ≤ x+y, n odd} χ(n) over elements. Even n are skipped so the
/// trivial character counts the odd lattice points.
pub fn short_char_sum(chi: &QuadraticCharacter, x: f64, y: f64) -> Result<f64> {
    let range = annulus(x, y)?;
    let gen = chi.generator();
    let mut total = 0i64;
    let mut err = None;
    for_each_in_range(range, |n| {
        if err.is_some() || !n.is_odd() {
            return;
        }
        match super::quad_symbol(gen, n) {
            Ok(s) => total += s as i64,
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(total as f64),
    }
}

/// Result of a log-linear fit log|S| ≈ c + α log y + β log N(D).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub alpha: f64,
    pub beta: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

/// Least squares on samples (y, N(D), |S|). Values below 1 are clamped to 1
/// before taking logarithms.
pub fn exponent_fit_samples(samples: &[(f64, f64, f64)]) -> Result<ExponentFit> {
    let rows: Vec<[f64; 3]> = samples.iter().map(|&(y, nd, _)| [1.0, y.ln(), nd.ln()]).collect();
    let rhs: Vec<f64> = samples.iter().map(|&(_, _, s)| s.abs().max(1.0).ln()).collect();
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for (r, &t) in rows.iter().zip(&rhs) {
        for i in 0..3 {
            b[i] += r[i] * t;
            for j in 0..3 {
                a[i][j] += r[i] * r[j];
            }
        }
    }
    let coef = solve3(a, b).ok_or_else(|| Error::Fit("rank-deficient design (vary both y and N(D))".into()))?;
    let residual = (rows
        .iter()
        .zip(&rhs)
        .map(|(r, &t)| (t - (coef[0] * r[0] + coef[1] * r[1] + coef[2] * r[2])).powi(2))
        .sum::<f64>()
        / rows.len().max(1) as f64)
        .sqrt();
    Ok(ExponentFit { alpha: coef[1], beta: coef[2], intercept: coef[0], residual })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..3 {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some([b[0] / a[0][0], b[1] / a[1][1], b[2] / a[2][2]])
}

/// Fit exponents for an arbitrary coefficient family. For each sample D and
/// each length y the recorded value is the largest |Σ coeff(D, n)| over the
/// windows starting at x ∈ {0, y, 2y, 3y}; n runs over odd elements.
pub fn exponent_fit_by<F>(exec: Exec, d_samples: &[G], y_grid: &[f64], coeff: F) -> Result<ExponentFit>
where
    F: Fn(G, G) -> f64 + Sync + Send,
{
    if d_samples.len() < 5 || y_grid.len() < 3 {
        return Err(Error::Fit("need at least 5 discriminants and 3 lengths".into()));
    }
    let jobs: Vec<(G, f64)> = d_samples.iter().flat_map(|&d| y_grid.iter().map(move |&y| (d, y))).collect();
    let samples = par::try_map(exec, &jobs, |&(d, y)| -> Result<(f64, f64, f64)> {
        let mut best = 0.0f64;
        for k in 0..4 {
            let x = k as f64 * y;
            let mut s = 0.0;
            for_each_in_range(annulus(x, y)?, |n| {
                if n.is_odd() {
                    s += coeff(d, n);
                }
            });
            best = best.max(s.abs());
        }
        Ok((y, d.norm() as f64, best))
    })?;
    exponent_fit_samples(&samples)
}

/// Empirical quadratic exponent pair from real characters χ_D.
pub fn exponent_fit(d_samples: &[G], y_grid: &[f64]) -> Result<ExponentFit> {
    for &d in d_samples {
        if super::is_perfect_square(d)? {
            return Err(Error::Degenerate(d.to_string()));
        }
    }
    exponent_fit_by(Exec::default(), d_samples, y_grid, |d, n| super::quad_symbol(d, n).unwrap_or(0) as f64)
}

/// Symbol matrix for the quadratic large sieve: rows are odd squarefree
/// canonical m with N(m) ≤ M, columns odd squarefree canonical n with
/// N(n) ≤ N, entries (n/m).
#[derive(Debug, Clone)]
pub struct LargeSieveSetup {
    pub big_m: u64,
    pub big_n: u64,
    pub ms: Vec<G>,
    pub ns: Vec<G>,
    matrix: Vec<i8>,
}

fn odd_squarefree(bound: u64) -> Result<Vec<G>> {
    let t = IdealTable::new(bound)?;
    let mu = t.multiplicative(1i8, |_, e| if e == 1 { -1 } else { 0 });
    Ok(t.reps().iter().zip(&mu).filter(|(z, &m)| z.is_odd() && m != 0).map(|(z, _)| *z).collect())
}

impl LargeSieveSetup {
    pub fn new(big_m: u64, big_n: u64) -> Result<Self> {
        let ms = odd_squarefree(big_m)?;
        let ns = odd_squarefree(big_n)?;
        let rows = par::try_map(Exec::default(), &ms, |&m| -> Result<Vec<i8>> {
            let f = factor(m)?;
            ns.iter()
                .map(|&n| {
                    let mut v = 1i8;
                    for &(p, _) in &f.factors {
                        v *= euler_symbol(n, p)?;
                    }
                    Ok(v)
                })
                .collect()
        })?;
        Ok(Self { big_m, big_n, ms, ns, matrix: rows.concat() })
    }

    /// LHS / ((M + N)·Σ|a_n|²) for coefficients aligned with `ns`.
    pub fn ratio(&self, coeffs: &[Complex64]) -> Result<f64> {
        if coeffs.len() != self.ns.len() {
            return Err(Error::domain("coefficient vector does not match the n-support"));
        }
        let energy: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum();
        if energy == 0.0 {
            return Err(Error::domain("empty coefficient set"));
        }
        let w = self.ns.len();
        let lhs: f64 = (0..self.ms.len())
            .map(|i| {
                let row = &self.matrix[i * w..(i + 1) * w];
                let s: Complex64 = row.iter().zip(coeffs).map(|(&x, a)| a * x as f64).sum();
                s.norm_sqr()
            })
            .sum();
        Ok(lhs / ((self.big_m + self.big_n) as f64 * energy))
    }
}

/// One-shot large sieve ratio for a sparse coefficient map.
pub fn large_sieve_ratio(big_m: u64, big_n: u64, coeffs: &BTreeMap<G, Complex64>) -> Result<f64> {
    if coeffs.is_empty() {
        return Err(Error::domain("empty coefficient set"));
    }
    let setup = LargeSieveSetup::new(big_m, big_n)?;
    let mut dense = vec![Complex64::new(0.0, 0.0); setup.ns.len()];
    for (&n, &a) in coeffs {
        let k = setup
            .ns
            .iter()
            .position(|&x| x == n)
            .ok_or_else(|| Error::domain(format!("coefficient at {n}: support must be odd squarefree canonical with N(n) ≤ {big_n}")))?;
        dense[k] = a;
    }
    setup.ratio(&dense)
}

/// Independent random ±1 vectors drawn from the named stream.
pub fn random_sign_coeffs(seed: u64, len: usize, count: usize) -> Vec<Vec<Complex64>> {
    let mut rng = crate::rng::stream(seed, "large-sieve");
    (0..count)
        .map(|_| (0..len).map(|_| Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::is_perfect_square;
    use crate::gaussian::{is_squarefree, NormRange};

    fn g(a: i64, b: i64) -> G {
        G::new(a, b)
    }

    #[test]
    fn orthogonality_over_a_period() {
        for delta in [g(1, 2), g(3, 0), g(5, 2), g(2, 3), g(-3, 0)] {
            let chi = QuadraticCharacter::for_disc(delta).unwrap();
            let sys = crate::kloosterman::ResidueSystem::new(chi.conductor).unwrap();
            let s: i64 = sys
                .representatives
                .iter()
                .filter(|n| n.is_odd())
                .map(|&n| chi.eval_odd(n).unwrap() as i64)
                .sum();
            assert_eq!(s, 0, "delta = {delta}");
        }
    }

    #[test]
    fn trivial_character_counts_odd_points() {
        let chi = QuadraticCharacter::trivial();
        let s = short_char_sum(&chi, 100.0, 50.0).unwrap();
        let mut odd = 0;
        for_each_in_range(NormRange::new(100, 150).unwrap(), |n| odd += n.is_odd() as i32);
        assert_eq!(s, odd as f64);
    }

    #[test]
    fn short_sum_range_checks() {
        let chi = QuadraticCharacter::for_disc(g(1, 2)).unwrap();
        assert!(short_char_sum(&chi, 10.0, 20.0).is_err());
        assert!(short_char_sum(&chi, 0.0, 20.0).is_ok());
    }

    #[test]
    fn fit_rejects_single_discriminant() {
        let ds = vec![g(1, 2); 5];
        assert!(matches!(exponent_fit(&ds, &[10.0, 100.0, 1000.0]), Err(Error::Fit(_))));
    }

    #[test]
    fn fit_of_trivial_summand_has_slope_one() {
        let ds: Vec<G> = (1..=6).map(|k| g(2 * k + 1, 2)).collect();
        let f = exponent_fit_by(Exec::default(), &ds, &[100.0, 400.0, 1600.0], |_, _| 1.0).unwrap();
        assert!((f.alpha - 1.0).abs() < 0.1, "{f:?}");
    }

    #[test]
    fn large_sieve_unit_vector() {
        // a_n = 1 at n = 1 only: every symbol is 1
        let mut coeffs = BTreeMap::new();
        coeffs.insert(G::ONE, Complex64::new(1.0, 0.0));
        let r = large_sieve_ratio(200, 200, &coeffs).unwrap();
        let count = crate::gaussian::IdealTable::new(200)
            .unwrap()
            .reps()
            .iter()
            .filter(|z| z.is_odd() && is_squarefree(**z).unwrap())
            .count();
        assert!((r - count as f64 / 400.0).abs() < 1e-12);
        assert!(large_sieve_ratio(200, 200, &BTreeMap::new()).is_err());
    }

    #[test]
    fn perfect_squares() {
        assert!(is_perfect_square(g(-4, 0)).unwrap());
        assert!(is_perfect_square(g(-3, 4)).unwrap()); // (1+2i)²
        assert!(!is_perfect_square(g(0, 4)).unwrap()); // 4i
    }
}
