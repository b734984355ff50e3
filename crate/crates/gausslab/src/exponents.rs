//! Exact-rational exponent calculus for the error term E_Γ(x) of the prime
//! geodesic theorem: the chronology table, the curves δ₀, δ₁, δ₂, second-moment
//! exponents, zero-density exponents, quadratic exponent pairs and the final
//! optimization over σ.
//!
//! Everything here is exact. Floating point appears only in [`to_f64`] and the
//! decimal renderers.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Reduced fraction with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    assert!(q != 0, "zero denominator");
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

fn min_r(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

fn max_r(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a
    } else {
        b
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.125`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse { line: None, msg: format!("not a rational number: {s:?}") };
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let w: BigInt = match whole.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| bad())?,
        };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let v = Rational::new(w * &scale + f, scale);
        return Ok(if neg { -v } else { v });
    }
    t.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad())
}

/// `p/q`, or just `p` for integers.
pub fn render(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal expansion cut (not rounded) after `digits` places. Terminating
/// expansions shorter than that are printed in full without padding.
pub fn decimal_truncated(r: &Rational, digits: usize) -> String {
    decimal_with(r, digits, false)
}

/// Decimal expansion rounded half-up at `digits` places.
pub fn decimal_rounded(r: &Rational, digits: usize) -> String {
    decimal_with(r, digits, true)
}

fn decimal_with(r: &Rational, digits: usize, round: bool) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = a.clone() * Rational::from_integer(scale.clone());
    let mut n = scaled.floor().to_integer();
    if round && scaled.fract() * int(2) >= Rational::one() {
        n += 1;
    }
    let (whole, frac) = n.div_rem(&scale);
    let mut frac_s = format!("{:0>width$}", frac.to_string(), width = digits);
    // trim zeros only when the expansion genuinely terminates there
    let exact = Rational::from_integer(n.clone()) == scaled;
    if exact {
        while frac_s.ends_with('0') {
            frac_s.pop();
        }
    }
    let sign = if neg && !(whole.is_zero() && frac_s.chars().all(|c| c == '0')) { "-" } else { "" };
    if frac_s.is_empty() {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac_s}")
    }
}

/// Whether the expansion of r terminates within `digits` places.
pub fn terminates_within(r: &Rational, digits: usize) -> bool {
    let scaled = r * Rational::from_integer(num_traits::pow(BigInt::from(10), digits));
    scaled.is_integer()
}

/// The parameters threaded through the endgame, with their admissible ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentConfig {
    /// subconvexity exponent in the conductor aspect, in [0, 1/4)
    pub theta: Rational,
    /// archimedean exponent, ≥ 0
    pub theta_prime: Rational,
    /// second-moment saving, in [0, 1/4]
    pub eta: Rational,
    /// in [1/2, 1]
    pub sigma: Rational,
}

impl ExponentConfig {
    pub fn validate(&self) -> Result<()> {
        check_theta(&self.theta)?;
        if self.theta_prime.is_negative() {
            return Err(Error::domain(format!("theta' must be ≥ 0, got {}", render(&self.theta_prime))));
        }
        if self.eta.is_negative() || self.eta > rat(1, 4) {
            return Err(Error::domain(format!("eta must lie in [0, 1/4], got {}", render(&self.eta))));
        }
        check_sigma(&self.sigma)
    }

    /// The stricter η range used by the second-moment formulas.
    pub fn validate_second_moment(&self) -> Result<()> {
        self.validate()?;
        check_eta(&self.theta, &self.eta)
    }
}

fn check_theta(theta: &Rational) -> Result<()> {
    if theta.is_negative() || *theta >= rat(1, 4) {
        return Err(Error::domain(format!("theta must lie in [0, 1/4), got {}", render(theta))));
    }
    Ok(())
}

fn check_sigma(sigma: &Rational) -> Result<()> {
    if *sigma < rat(1, 2) || *sigma > int(1) {
        return Err(Error::domain(format!("sigma must lie in [1/2, 1], got {}", render(sigma))));
    }
    Ok(())
}

fn check_eta(theta: &Rational, eta: &Rational) -> Result<()> {
    let cap = min_r(rat(1, 4), int(2) * theta);
    if eta.is_negative() || *eta > cap {
        return Err(Error::domain(format!(
            "eta must lie in [0, min(1/4, 2·theta)] = [0, {}], got {}",
            render(&cap),
            render(eta)
        )));
    }
    Ok(())
}

/// The prior record (34 + 12θ + 8(2+θ)m)/(23 + 10m) with m = min(1/4, 2θ).
pub fn delta0(theta: &Rational) -> Result<Rational> {
    check_theta(theta)?;
    let m = min_r(rat(1, 4), int(2) * theta);
    Ok((int(34) + int(12) * theta + int(8) * (int(2) + theta) * &m) / (int(23) + int(10) * m))
}

/// The unconditional exponent max((23+6θ)/16, (7+3θ)/5); the branches cross at θ = 1/6.
pub fn delta1(theta: &Rational) -> Result<Rational> {
    check_theta(theta)?;
    Ok(max_r((int(23) + int(6) * theta) / int(16), (int(7) + int(3) * theta) / int(5)))
}

/// The conditional exponent 245/172 + 15θ/43.
pub fn delta2(theta: &Rational) -> Result<Rational> {
    check_theta(theta)?;
    Ok(rat(245, 172) + rat(15, 43) * theta)
}

/// Exponents (e1, e2) of V in the two terms bounding the mean square of E_Γ
/// over [V, V+Δ] when Δ = V^{y_exp}. The Δ-free parts are
/// (13+2θ+4(3+θ)η)/(4(1+η)) and 2(5+θ+(3+2θ)η)/(3+2η).
pub fn second_moment_exponents(theta: &Rational, eta: &Rational, y_exp: &Rational) -> Result<(Rational, Rational)> {
    check_theta(theta)?;
    check_eta(theta, eta)?;
    let lo = rat(1, 2) - theta;
    let hi = int(1) - theta + eta / int(2);
    if *y_exp < lo || *y_exp > hi {
        return Err(Error::domain(format!(
            "y_exp must lie in [{}, {}], got {}",
            render(&lo),
            render(&hi),
            render(y_exp)
        )));
    }
    let (a1, b1, a2, b2) = second_moment_parts(theta, eta);
    Ok((b1 - a1 * y_exp, b2 - a2 * y_exp))
}

/// (a₁, b₁, a₂, b₂) with the mean square ≪ Δ^{−a₁}V^{b₁} + Δ^{−a₂}V^{b₂}.
fn second_moment_parts(theta: &Rational, eta: &Rational) -> (Rational, Rational, Rational, Rational) {
    let one = int(1);
    let a1 = one.clone() / (int(2) * (&one + eta));
    let b1 = (int(13) + int(2) * theta + int(4) * (int(3) + theta) * eta) / (int(4) * (&one + eta));
    let a2 = int(2) / (int(3) + int(2) * eta);
    let b2 = int(2) * (int(5) + theta + (int(3) + int(2) * theta) * eta) / (int(3) + int(2) * eta);
    (a1, b1, a2, b2)
}

/// Pointwise exponent obtained from the second moment. Over a window of length
/// Δ = V^d the error term moves by ≪ V^{1+d}, so E(V) ≪ (mean square)^{1/2} +
/// V^{1+d}; each term Δ^{−a}V^{b} balances at d = (b−2)/(2+a), and the best
/// common d is the larger balance point, clamped to the admissible Δ range.
pub fn mean_to_max(theta: &Rational, eta: &Rational) -> Result<Rational> {
    check_theta(theta)?;
    check_eta(theta, eta)?;
    let (a1, b1, a2, b2) = second_moment_parts(theta, eta);
    let d1 = (b1.clone() - int(2)) / (int(2) + &a1);
    let d2 = (b2.clone() - int(2)) / (int(2) + &a2);
    let lo = rat(1, 2) - theta;
    let hi = int(1) - theta + eta / int(2);
    let d = min_r(max_r(max_r(d1, d2), lo), hi);
    let half = rat(1, 2);
    let root1 = half.clone() * (b1 - a1 * &d);
    let root2 = half * (b2 - a2 * &d);
    Ok(max_r(max_r(root1, root2), int(1) + d))
}

/// Zero-density exponents ((Q, T) prior, (Q, T) new) at σ:
/// prior (10(1−σ)/(3−σ), (7−5σ)/(3−σ)), new (3(1−σ)/(2−σ), (4−3σ)/(2−σ)).
pub type ExponentPair = (Rational, Rational);

pub fn zero_density_exponents(sigma: &Rational) -> Result<(ExponentPair, ExponentPair)> {
    check_sigma(sigma)?;
    let one = int(1);
    let prior = (
        int(10) * (&one - sigma) / (int(3) - sigma),
        (int(7) - int(5) * sigma) / (int(3) - sigma),
    );
    let new = (int(3) * (&one - sigma) / (int(2) - sigma), (int(4) - int(3) * sigma) / (int(2) - sigma));
    Ok((prior, new))
}

/// Membership in {0 ≤ β ≤ 1/2 ≤ α ≤ 1} ∪ {(0, 1/2), (1, 0)}.
pub fn is_admissible(alpha: &Rational, beta: &Rational) -> bool {
    let half = rat(1, 2);
    let interior = !beta.is_negative() && *beta <= half && half <= *alpha && *alpha <= int(1);
    interior || (alpha.is_zero() && *beta == half) || (alpha.is_one() && beta.is_zero())
}

/// The quadratic exponent pair (1 − 1/(2(1+θ′)), θ/(1+θ′)).
pub fn exponent_pair_bootstrap(theta: &Rational, theta_prime: &Rational) -> Result<ExponentPair> {
    check_theta(theta)?;
    if theta_prime.is_negative() {
        return Err(Error::domain("theta' must be ≥ 0"));
    }
    let den = int(1) + theta_prime;
    let alpha = int(1) - int(1) / (int(2) * &den);
    let beta = theta.clone() / den;
    if !is_admissible(&alpha, &beta) {
        return Err(Error::Consistency(format!(
            "pair ({}, {}) left the admissible set",
            render(&alpha),
            render(&beta)
        )));
    }
    Ok((alpha, beta))
}

/// (α, β) ↦ (1−α, α+β−1/2). An involution.
pub fn dual(alpha: &Rational, beta: &Rational) -> ExponentPair {
    (int(1) - alpha, alpha + beta - rat(1, 2))
}

/// The window σ must fall in. At θ′ = 0 it is [103/116, 446/481], the image of
/// θ ∈ [0, 1/4]. For θ′ > 0 the upper end moves: σ → (232−52θ)/(245−26θ) as
/// θ′ → ∞, and the supremum over the whole range is 232/245 (at θ = 0).
pub fn sigma_bracket(theta_prime: &Rational) -> (Rational, Rational) {
    if theta_prime.is_zero() {
        (rat(103, 116), rat(446, 481))
    } else {
        (rat(103, 116), rat(232, 245))
    }
}

/// σ = (206 + (68−52θ′)θ + 232θ′)/(232 + (34−26θ′)θ + 245θ′), the solution of
/// "second term = penultimate term" in the endgame. θ = 1/4 itself is
/// accepted so that the right end of the bracket can be evaluated.
pub fn optimal_sigma(theta: &Rational, theta_prime: &Rational) -> Result<Rational> {
    if theta.is_negative() || *theta > rat(1, 4) {
        return Err(Error::domain(format!("theta must lie in [0, 1/4], got {}", render(theta))));
    }
    if theta_prime.is_negative() {
        return Err(Error::domain("theta' must be ≥ 0"));
    }
    let tp = theta_prime;
    let num = int(206) + (int(68) - int(52) * tp) * theta + int(232) * tp;
    let den = int(232) + (int(34) - int(26) * tp) * theta + int(245) * tp;
    let sigma = num / den;
    let (lo, hi) = sigma_bracket(tp);
    if sigma < lo || sigma > hi {
        return Err(Error::Consistency(format!(
            "sigma = {} outside [{}, {}]",
            render(&sigma),
            render(&lo),
            render(&hi)
        )));
    }
    Ok(sigma)
}

/// Q = (3 + 2β − (3+β)σ)/((3 − 2α)(2 − σ)), the quantity every endgame term is affine in.
pub fn endgame_q(alpha: &Rational, beta: &Rational, sigma: &Rational) -> Rational {
    (int(3) + int(2) * beta - (int(3) + beta) * sigma) / ((int(3) - int(2) * alpha) * (int(2) - sigma))
}

/// The six exponents of x bounding E_Γ(x) before the choice of σ. The third
/// one carries δ, the exponent being bounded, with slope 18/13; it is kept as
/// the affine form `delta_slope·δ + delta_offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndgameTerms {
    /// terms 1, 2, 4, 5, 6 in order
    pub fixed: [Rational; 5],
    pub delta_slope: Rational,
    pub delta_offset: Rational,
}

pub const ENDGAME_LABELS: [&str; 6] = [
    "14/13+24Q/13",
    "5/4+15Q/13",
    "(18δ-4)/13-12Q/13",
    "3/2+θ-Q",
    "3/2+θ/2-Q/2",
    "37/26",
];

impl EndgameTerms {
    pub fn new(theta: &Rational, q: &Rational) -> Self {
        let fixed = [
            rat(14, 13) + rat(24, 13) * q,
            rat(5, 4) + rat(15, 13) * q,
            rat(3, 2) + theta - q,
            rat(3, 2) + theta / int(2) - q / int(2),
            rat(37, 26),
        ];
        Self { fixed, delta_slope: rat(18, 13), delta_offset: rat(-4, 13) - rat(12, 13) * q }
    }

    /// All six terms with δ substituted, in the original order.
    pub fn at_delta(&self, delta: &Rational) -> [Rational; 6] {
        let f = &self.fixed;
        let t3 = self.delta_slope.clone() * delta + &self.delta_offset;
        [f[0].clone(), f[1].clone(), t3, f[2].clone(), f[3].clone(), f[4].clone()]
    }

    pub fn max_fixed(&self) -> Rational {
        self.fixed.iter().max().expect("five terms").clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndgameReport {
    pub alpha: Rational,
    pub beta: Rational,
    pub sigma: Rational,
    pub q: Rational,
    pub terms: EndgameTerms,
    /// max over the five δ-free terms
    pub exponent: Rational,
    /// 1-based labels of the δ-free terms strictly above max(term 2, term 5)
    pub dominance_violations: Vec<usize>,
    /// solution of δ = max(exponent, 18δ/13 + offset) in [5/4, 3/2], if any
    pub fixed_point: Option<Rational>,
}

/// Evaluates the endgame at (α, β) from [`exponent_pair_bootstrap`] and σ from
/// [`optimal_sigma`].
pub fn endgame_exponent(theta: &Rational, theta_prime: &Rational) -> Result<EndgameReport> {
    let (alpha, beta) = exponent_pair_bootstrap(theta, theta_prime)?;
    let sigma = optimal_sigma(theta, theta_prime)?;
    let q = endgame_q(&alpha, &beta, &sigma);
    let terms = EndgameTerms::new(theta, &q);
    let exponent = terms.max_fixed();
    let pivot = max_r(terms.fixed[1].clone(), terms.fixed[3].clone());
    let labels = [1, 2, 4, 5, 6];
    let dominance_violations = terms.fixed.iter().zip(labels).filter(|(t, _)| **t > pivot).map(|(_, l)| l).collect();
    let fixed_point = solve_fixed_point(&exponent, &terms.delta_slope, &terms.delta_offset).ok();
    Ok(EndgameReport { alpha, beta, sigma, q, terms, exponent, dominance_violations, fixed_point })
}

/// Exact solution of δ = max(a, m·δ + c) with δ ∈ [5/4, 3/2], branch by branch.
pub fn solve_fixed_point(a: &Rational, m: &Rational, c: &Rational) -> Result<Rational> {
    let in_range = |d: &Rational| *d >= rat(5, 4) && *d <= rat(3, 2);
    let mut candidates = Vec::new();
    // branch δ = a, valid when the affine term does not exceed it
    if m.clone() * a + c <= *a && in_range(a) {
        candidates.push(a.clone());
    }
    // branch δ = mδ + c, valid when it is at least a
    if !m.is_one() {
        let d = c.clone() / (int(1) - m);
        if d >= *a && in_range(&d) {
            candidates.push(d);
        }
    }
    candidates.sort();
    candidates.dedup();
    match candidates.len() {
        1 => Ok(candidates.pop().expect("one candidate")),
        0 => {
            let at_a = m.clone() * a + c;
            let crossing = if m.is_one() { None } else { Some(c.clone() / (int(1) - m)) };
            Err(Error::Consistency(format!(
                "δ = max({}, {}·δ {} {}) has no solution in [5/4, 3/2]: at δ = {} the affine branch is {} ≈ {:.5} > δ, \
                 and the affine branch meets the diagonal only at δ = {}",
                render(a),
                render(m),
                if c.is_negative() { "−" } else { "+" },
                render(&c.abs()),
                render(a),
                render(&at_a),
                to_f64(&at_a),
                crossing.map(|d| format!("{} ≈ {:.5}", render(&d), to_f64(&d))).unwrap_or_else(|| "nowhere".into()),
            )))
        }
        _ => Err(Error::Consistency(format!(
            "fixed point is not unique: {}",
            candidates.iter().map(render).collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// Solves the fixed-point equation for δ at θ (θ′ = 0; the δ-free part does
/// not depend on θ′). Returns `Error::Consistency` when no solution exists.
pub fn fixed_point_delta(theta: &Rational) -> Result<Rational> {
    let r = endgame_exponent(theta, &Rational::zero())?;
    solve_fixed_point(&r.exponent, &r.terms.delta_slope, &r.terms.delta_offset)
}

/// (threshold, e1, e2) = ((1+2θ)/3, 1+θ, 5/4+θ/2): Ψ(x+y) − Ψ(x) has error
/// ≪ x^{e1}y^{1/2} + x^{e2}y^{1/4} for x^{threshold} ≤ y ≤ x.
pub fn bt_exponents(theta: &Rational) -> Result<(Rational, Rational, Rational)> {
    if theta.is_negative() || *theta > rat(1, 4) {
        return Err(Error::domain(format!("theta must lie in [0, 1/4], got {}", render(theta))));
    }
    Ok(((int(1) + int(2) * theta) / int(3), int(1) + theta, rat(5, 4) + theta / int(2)))
}

/// κ with (1−κ)/(1−λ) = (3−2κ)/(1+2λ), i.e. κ = (5λ−2)/(4λ−1).
pub fn balanced_kappa(lambda: &Rational) -> Result<Rational> {
    let den = int(4) * lambda - int(1);
    if den.is_zero() || lambda.is_one() {
        return Err(Error::domain(format!("no balanced κ at λ = {}", render(lambda))));
    }
    Ok((int(5) * lambda - int(2)) / den)
}

/// λ with (1−κ)/(1−λ) = (3−2κ)/(1+2λ), i.e. λ = (2−κ)/(5−4κ).
pub fn balanced_lambda(kappa: &Rational) -> Result<Rational> {
    let den = int(5) - int(4) * kappa;
    if den.is_zero() {
        return Err(Error::domain(format!("no balanced λ at κ = {}", render(kappa))));
    }
    Ok((int(2) - kappa) / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChronologyRow {
    pub year: u16,
    /// assumes the Lindelöf exponent θ = 0
    pub conditional: bool,
    /// needs a further unproven hypothesis on top of θ = 0
    pub extra_hypothesis: bool,
    pub value: Rational,
    /// digits as printed in the published table
    pub printed: &'static str,
}

impl ChronologyRow {
    pub fn label(&self) -> String {
        match (self.conditional, self.extra_hypothesis) {
            (false, _) => self.year.to_string(),
            (true, false) => format!("{} (θ = 0)", self.year),
            (true, true) => format!("{} (θ = 0, extra hypothesis)", self.year),
        }
    }

    /// Whether `printed` agrees with the exact value: either a full terminating
    /// expansion, or five places by truncation or by rounding. The printed
    /// table mixes the two conventions.
    pub fn printed_matches(&self) -> bool {
        let digits = self.printed.split_once('.').map_or(0, |(_, f)| f.len());
        if terminates_within(&self.value, digits) {
            return decimal_truncated(&self.value, digits) == self.printed;
        }
        decimal_truncated(&self.value, digits) == self.printed || decimal_rounded(&self.value, digits) == self.printed
    }
}

/// The nine known exponents, oldest first within each group. Rows that the
/// formulas here reproduce are computed, the rest are literature values.
pub fn table_chronology() -> Vec<ChronologyRow> {
    let sixth = rat(1, 6);
    let zero = Rational::zero();
    let row = |year, conditional, extra_hypothesis, value, printed| ChronologyRow {
        year,
        conditional,
        extra_hypothesis,
        value,
        printed,
    };
    vec![
        row(1983, false, false, rat(5, 3), "1.66666"),
        row(2019, false, false, rat(13, 8), "1.625"),
        row(2022, false, false, rat(67, 42), "1.59524"),
        row(2022, false, false, rat(376, 237), "1.58649"),
        row(2024, false, false, delta0(&sixth).expect("in range"), "1.58169"),
        row(2001, true, false, rat(11, 7), "1.57143"),
        row(2020, true, false, delta1(&sixth).expect("in range"), "1.5"),
        row(2022, true, false, delta0(&zero).expect("in range"), "1.47826"),
        row(2022, true, true, rat(10, 7), "1.42857"),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaCurveRow {
    pub theta: Rational,
    pub delta0: Rational,
    pub delta1: Rational,
    pub delta2: Rational,
}

/// δ₀, δ₁, δ₂ at θ = k/(4n), k = 0..n (the right end 1/4 is excluded).
pub fn theta_curve(n: usize) -> Result<Vec<ThetaCurveRow>> {
    if n == 0 {
        return Err(Error::domain("grid needs at least one point"));
    }
    (0..n)
        .map(|k| {
            let theta = rat(k as i64, 4 * n as i64);
            Ok(ThetaCurveRow { delta0: delta0(&theta)?, delta1: delta1(&theta)?, delta2: delta2(&theta)?, theta })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaCurveRow {
    pub sigma: Rational,
    pub prior: ExponentPair,
    pub new: ExponentPair,
}

/// Zero-density exponents at σ = 1/2 + k/(2n), k = 0..=n.
pub fn sigma_curve(n: usize) -> Result<Vec<SigmaCurveRow>> {
    if n == 0 {
        return Err(Error::domain("grid needs at least one step"));
    }
    (0..=n)
        .map(|k| {
            let sigma = rat(1, 2) + rat(k as i64, 2 * n as i64);
            let (prior, new) = zero_density_exponents(&sigma)?;
            Ok(SigmaCurveRow { sigma, prior, new })
        })
        .collect()
}

/// The θ above which the endgame term 3/2 + θ − Q overtakes the optimized pair
/// of terms. At the optimal σ, Q = 13(1+2θ)/86, and θ > Q exactly when θ > 13/60.
pub fn dominance_threshold() -> Rational {
    rat(13, 60)
}

/// Exact comparison helper for the CLI and tests.
pub fn cmp(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parse_and_render() {
        assert_eq!(r("6/4"), rat(3, 2));
        assert_eq!(r("0.125"), rat(1, 8));
        assert_eq!(r("-0.5"), rat(-1, 2));
        assert_eq!(r("7"), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(render(&rat(-6, 4)), "-3/2");
        assert_eq!(render(&int(2)), "2");
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal_truncated(&rat(376, 237), 5), "1.58649");
        assert_eq!(decimal_rounded(&rat(67, 42), 5), "1.59524");
        assert_eq!(decimal_truncated(&rat(13, 8), 5), "1.625");
        assert_eq!(decimal_truncated(&rat(-1, 3), 3), "-0.333");
        assert_eq!(decimal_rounded(&rat(2, 3), 2), "0.67");
    }

    #[test]
    fn deltas() {
        assert_eq!(delta0(&int(0)).unwrap(), rat(34, 23));
        assert_eq!(delta0(&rat(1, 6)).unwrap(), rat(242, 153));
        assert_eq!(delta0(&rat(1, 8)).unwrap(), rat(53, 34));
        assert_eq!(delta1(&int(0)).unwrap(), rat(23, 16));
        assert_eq!(delta1(&rat(1, 6)).unwrap(), rat(3, 2));
        let below = rat(1, 6) - rat(1, 1_000_000);
        assert_eq!(delta1(&below).unwrap(), (int(23) + int(6) * &below) / int(16));
        assert_eq!(delta2(&int(0)).unwrap(), rat(245, 172));
        assert_eq!(delta2(&rat(1, 6)).unwrap(), rat(255, 172));
        assert!(delta2(&rat(1, 4)).is_err());
        assert_eq!(rat(245, 172) + rat(15, 172), rat(65, 43));
    }

    #[test]
    fn second_moment() {
        let (e1, e2) = second_moment_exponents(&int(0), &int(0), &int(1)).unwrap();
        assert_eq!((e1, e2), (rat(11, 4), rat(8, 3)));
        assert!(second_moment_exponents(&rat(1, 16), &rat(1, 4), &int(1)).is_err());
        assert!(second_moment_exponents(&int(0), &int(0), &rat(1, 4)).is_err());
        assert_eq!(mean_to_max(&rat(1, 6), &rat(1, 4)).unwrap(), rat(14, 9));
        for k in 13..25 {
            let t = rat(k, 100);
            assert_eq!(mean_to_max(&t, &rat(1, 4)).unwrap(), rat(3, 2) + t / int(3));
        }
    }

    #[test]
    fn zero_density() {
        let (p, n) = zero_density_exponents(&int(1)).unwrap();
        assert_eq!((p, n), ((int(0), int(1)), (int(0), int(1))));
        let (p, n) = zero_density_exponents(&rat(1, 2)).unwrap();
        assert_eq!((p, n), ((int(2), rat(9, 5)), (int(1), rat(5, 3))));
        assert!(zero_density_exponents(&rat(2, 5)).is_err());
    }

    #[test]
    fn pairs() {
        assert_eq!(exponent_pair_bootstrap(&int(0), &int(0)).unwrap(), (rat(1, 2), int(0)));
        assert_eq!(dual(&int(1), &int(0)), (int(0), rat(1, 2)));
        let (t, tp) = (rat(1, 6), rat(3, 7));
        let (a, b) = exponent_pair_bootstrap(&t, &tp).unwrap();
        let d = dual(&a, &b);
        let expected = (int(1) / (int(2) * (int(1) + &tp)), (int(2) * &t + &tp) / (int(2) * (int(1) + &tp)));
        assert_eq!(d, expected);
        assert_eq!(dual(&d.0, &d.1), (a, b));
        assert!(!is_admissible(&rat(1, 4), &int(0)));
    }

    #[test]
    fn sigma_and_endgame() {
        assert_eq!(optimal_sigma(&int(0), &int(0)).unwrap(), rat(103, 116));
        assert_eq!(optimal_sigma(&rat(1, 4), &int(0)).unwrap(), rat(446, 481));
        assert!(optimal_sigma(&rat(1, 3), &int(0)).is_err());
        for t in [int(0), rat(1, 8), rat(1, 6)] {
            let base = endgame_exponent(&t, &int(0)).unwrap();
            for tp in [int(1), int(2), int(10)] {
                let e = endgame_exponent(&t, &tp).unwrap();
                assert_eq!(e.exponent, base.exponent);
                assert_eq!(e.exponent, delta2(&t).unwrap());
                assert!(e.dominance_violations.is_empty());
                // second and penultimate terms are equal at the optimum
                assert_eq!(e.terms.fixed[1], e.terms.fixed[3]);
            }
        }
    }

    #[test]
    fn dominance_breaks_near_a_quarter() {
        let at = endgame_exponent(&dominance_threshold(), &int(0)).unwrap();
        assert!(at.dominance_violations.is_empty());
        let past = endgame_exponent(&rat(6, 25), &int(0)).unwrap();
        assert_eq!(past.dominance_violations, vec![4]);
        assert!(past.exponent > delta2(&rat(6, 25)).unwrap());
    }

    #[test]
    fn fixed_point_equation() {
        // a well-posed instance: slope below one
        assert_eq!(solve_fixed_point(&rat(4, 3), &rat(1, 2), &rat(1, 2)).unwrap(), rat(4, 3));
        assert_eq!(solve_fixed_point(&rat(5, 4), &rat(1, 2), &rat(3, 4)).unwrap(), rat(3, 2));
        // the endgame instance has slope 18/13 and the affine branch already
        // exceeds δ₂ at δ = δ₂, so there is no exact fixed point
        let e = fixed_point_delta(&int(0)).unwrap_err();
        assert!(matches!(e, Error::Consistency(_)));
        let r = endgame_exponent(&int(0), &int(0)).unwrap();
        assert_eq!(r.terms.delta_offset, rat(-250, 559));
        assert_eq!(r.terms.at_delta(&rat(245, 172))[2].clone() - rat(245, 172), rat(225, 2236));
        assert!(r.fixed_point.is_none());
    }

    #[test]
    fn brun_titchmarsh_and_balance() {
        assert_eq!(bt_exponents(&int(0)).unwrap().0, rat(1, 3));
        assert_eq!(bt_exponents(&rat(1, 4)).unwrap().0, rat(1, 2));
        assert_eq!(balanced_kappa(&rat(1, 2)).unwrap(), rat(1, 2));
        for l in [rat(1, 3), rat(2, 5), rat(3, 4)] {
            let k = balanced_kappa(&l).unwrap();
            assert_eq!((int(1) - &k) / (int(1) - &l), (int(3) - int(2) * &k) / (int(1) + int(2) * &l));
            assert_eq!(balanced_lambda(&k).unwrap(), l);
        }
    }

    #[test]
    fn chronology() {
        let rows = table_chronology();
        let values: Vec<Rational> = rows.iter().map(|r| r.value.clone()).collect();
        let expected = [
            rat(5, 3),
            rat(13, 8),
            rat(67, 42),
            rat(376, 237),
            rat(242, 153),
            rat(11, 7),
            rat(3, 2),
            rat(34, 23),
            rat(10, 7),
        ];
        assert_eq!(values, expected);
        assert!(rows.iter().all(|r| r.printed_matches()), "{rows:?}");
    }

    #[test]
    fn curves() {
        let c = theta_curve(50).unwrap();
        assert_eq!(c.len(), 50);
        assert!(c.iter().all(|r| r.delta2 < r.delta1 && r.delta1 < r.delta0));
        let s = sigma_curve(20).unwrap();
        assert_eq!(s.last().unwrap().sigma, int(1));
        assert!(s.iter().all(|r| r.new.0 <= r.prior.0 && r.new.1 <= r.prior.1));
    }
}
