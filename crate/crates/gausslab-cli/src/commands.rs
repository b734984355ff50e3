use crate::output::{exact, Table};
use crate::{Cli, Command, CurveKind, Failure, RunConfig};
use gausslab::characters::{quad_symbol, random_sign_coeffs, LargeSieveSetup};
use gausslab::exponents as ex;
use gausslab::gaussian::factor;
use gausslab::geodesics::{bessel_sum_rho, bilinear_F, short_interval, PsiEngine, KAPPA, NU};
use gausslab::kloosterman::{identity_suite, kloosterman_sum, weil_gundlach_margin};
use gausslab::lfunctions::{szmidt_check, zagier_L, SeriesParams, ZagierContext};
use gausslab::par::Exec;
use gausslab::spectral::{
    heckes_constant, load_spectrum, progression_sum_closed, spectral_exp_sum, synthetic_progression, test_function_params,
};
use gausslab::{Error, GaussianInt};
use num_complex::Complex64;
use std::fs::File;
use std::io::{BufWriter, Write};

/// Sharp cutoff used by the series subcommands when neither --cutoff nor
/// --smoothing is given.
pub const DEFAULT_CUTOFF: u64 = 100_000;

fn series_params(cfg: &RunConfig) -> Result<SeriesParams, Error> {
    match (cfg.cutoff, cfg.smoothing) {
        (Some(n), x) => SeriesParams::new(n, x, cfg.tol),
        (None, Some(x)) => SeriesParams::smoothed(x, cfg.tol),
        (None, None) => SeriesParams::sharp(DEFAULT_CUTOFF, cfg.tol),
    }
}

fn exec(cfg: &RunConfig) -> Exec {
    if cfg.threads == Some(1) {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn complex_s(s: f64, t: f64) -> Complex64 {
    Complex64::new(s, t)
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = &cli.config;
    if let Some(n) = cfg.threads {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global();
    }
    let (table, verdict) = build(&cli.command, cfg)?;
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    table.write(cfg.format, &mut sink)?;
    sink.flush()?;
    verdict
}

/// The table to print and, separately, whether the run counts as a success.
/// Self-checks print their full table even when they fail.
type Built = (Table, Result<(), Failure>);

fn ok(t: Table) -> Result<Built, Failure> {
    Ok((t, Ok(())))
}

fn build(cmd: &Command, cfg: &RunConfig) -> Result<Built, Failure> {
    match cmd {
        Command::Factor { z } => factor_cmd(*z),
        Command::Symbol { d, n } => {
            let mut t = Table::new(&["d", "n", "symbol"]);
            t.push(vec![(*d).into(), (*n).into(), quad_symbol(*d, *n)?.into()]);
            ok(t)
        }
        Command::Kloosterman { m, n, c } => {
            let s = kloosterman_sum(*m, *n, *c)?;
            let mut t = Table::new(&["m", "n", "c", "re", "im", "abs", "weil_ratio"]);
            t.push(vec![
                (*m).into(),
                (*n).into(),
                (*c).into(),
                s.re.into(),
                s.im.into(),
                s.norm().into(),
                weil_gundlach_margin(*m, *n, *c)?.into(),
            ]);
            ok(t)
        }
        Command::Identities { max_norm } => identities_cmd(cfg, *max_norm),
        Command::Zagier { delta, s, t: im } => {
            let ctx = ZagierContext::new(*delta)?;
            let v = zagier_L(&ctx, complex_s(*s, *im), &series_params(cfg)?)?;
            let mut t = Table::new(&["delta", "s_re", "s_im", "re", "im", "error_estimate"]);
            t.push(vec![(*delta).into(), (*s).into(), (*im).into(), v.value.re.into(), v.value.im.into(), v.error.into()]);
            ok(t)
        }
        Command::Szmidt { delta, s, t: im } => {
            let dev = szmidt_check(*delta, complex_s(*s, *im), &series_params(cfg)?)?;
            let mut t = Table::new(&["delta", "s_re", "s_im", "rel_dev"]);
            t.push(vec![(*delta).into(), (*s).into(), (*im).into(), dev.into()]);
            ok(t)
        }
        Command::Psi { x } => {
            let r = PsiEngine::global().psi_by(exec(cfg), *x, cfg.kappa.unwrap_or(KAPPA))?;
            let mut t = Table::new(&["x", "psi", "main_term", "error", "kappa", "terms", "excluded"]);
            t.push(vec![
                r.x.into(),
                r.psi.into(),
                r.main_term.into(),
                r.error.into(),
                r.normalization_kappa.into(),
                r.terms.into(),
                r.excluded_count.into(),
            ]);
            ok(t)
        }
        Command::ShortInterval { x, y } => {
            let kappa = cfg.kappa.unwrap_or(KAPPA);
            let r = short_interval(*x, *y, kappa)?;
            let mut t = Table::new(&["x", "y", "observed", "predicted", "rel_dev", "kappa"]);
            t.push(vec![(*x).into(), (*y).into(), r.observed.into(), r.predicted.into(), r.rel_dev.into(), kappa.into()]);
            ok(t)
        }
        Command::Bilinear { a, b, c } => {
            let b = b.unwrap_or(a * a);
            let c = c.unwrap_or(a.sqrt());
            let nu = cfg.nu.unwrap_or(NU);
            let (value, main) = bilinear_F(*a, b, c)?;
            let main = main / NU * nu;
            let mut t = Table::new(&["A", "B", "C", "value", "main_term", "rel_dev", "nu"]);
            t.push(vec![(*a).into(), b.into(), c.into(), value.into(), main.into(), (value as f64 / main - 1.0).into(), nu.into()]);
            ok(t)
        }
        Command::BesselSum { c, z } => {
            let r = bessel_sum_rho(*c, *z)?;
            let mut t = Table::new(&["c", "Z", "value", "main_term", "error"]);
            t.push(vec![(*c).into(), (*z).into(), r.value.into(), r.main.into(), r.err.into()]);
            ok(t)
        }
        Command::LargeSieve { m, n, trials } => {
            let setup = LargeSieveSetup::new(*m, *n)?;
            let mut t = Table::new(&["trial", "M", "N", "moduli", "support", "ratio"]);
            for (k, coeffs) in random_sign_coeffs(cfg.seed, setup.ns.len(), *trials).iter().enumerate() {
                t.push(vec![
                    k.into(),
                    (*m).into(),
                    (*n).into(),
                    setup.ms.len().into(),
                    setup.ns.len().into(),
                    setup.ratio(coeffs)?.into(),
                ]);
            }
            ok(t)
        }
        Command::SpectralSum { file, progression, big_t, big_x } => spectral_cmd(file.as_deref(), progression.as_deref(), *big_t, *big_x),
        Command::HeckesCheck { t_min, t_max, points, big_t, big_x } => heckes_cmd(*t_min, *t_max, *points, big_t, big_x),
        Command::Exponents { theta, theta_prime, eta } => exponents_cmd(theta, theta_prime, eta.as_ref()),
        Command::Table => {
            let mut t = Table::new(&[
                "year",
                "label",
                "conditional",
                "extra_hypothesis",
                "exact",
                "decimal",
                "printed",
                "printed_matches",
            ]);
            for row in ex::table_chronology() {
                let [r, d] = exact(&row.value);
                t.push(vec![
                    (row.year as u32).into(),
                    row.label().into(),
                    row.conditional.into(),
                    row.extra_hypothesis.into(),
                    r,
                    d,
                    row.printed.into(),
                    row.printed_matches().into(),
                ]);
            }
            ok(t)
        }
        Command::Curves { kind, n } => curves_cmd(*kind, *n),
    }
}

fn factor_cmd(z: GaussianInt) -> Result<Built, Failure> {
    let f = factor(z)?;
    let mut t = Table::new(&["z", "unit", "prime", "exponent", "prime_norm"]);
    if f.factors.is_empty() {
        t.push(vec![z.into(), f.unit.into(), GaussianInt::ONE.into(), 0u32.into(), 1u32.into()]);
    }
    for &(p, e) in &f.factors {
        t.push(vec![z.into(), f.unit.into(), p.into(), e.into(), p.norm().into()]);
    }
    ok(t)
}

fn identities_cmd(cfg: &RunConfig, max_norm: u64) -> Result<Built, Failure> {
    let checks = identity_suite(exec(cfg), max_norm, cfg.seed)?;
    let mut t = Table::new(&["identity", "cases", "failures", "worst", "status"]);
    let status = |pass: bool| if pass { "PASS" } else { "FAIL" };
    for c in &checks {
        t.push(vec![c.name.into(), c.cases.into(), c.failures.into(), c.worst.into(), status(c.passed()).into()]);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
    t.push(vec![
        "all".into(),
        checks.iter().map(|c| c.cases).sum::<u64>().into(),
        checks.iter().map(|c| c.failures).sum::<u64>().into(),
        checks.iter().map(|c| c.worst).fold(0.0, f64::max).into(),
        status(failed.is_empty()).into(),
    ]);
    let verdict = if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure { code: 1, message: format!("identity checks failed: {}", failed.join(", ")) })
    };
    Ok((t, verdict))
}

fn spectral_cmd(file: Option<&std::path::Path>, progression: Option<&[f64]>, big_t: f64, big_x: f64) -> Result<Built, Failure> {
    match (file, progression) {
        (Some(path), _) => {
            let spec = load_spectrum(path)?;
            for w in &spec.warnings {
                eprintln!("gausslab: warning: {w}");
            }
            let s = spectral_exp_sum(&spec, big_t, big_x)?;
            let mut t = Table::new(&["source", "T", "X", "count", "re", "im", "abs"]);
            t.push(vec![
                spec.source_label.clone().into(),
                big_t.into(),
                big_x.into(),
                spec.count_up_to(big_t).into(),
                s.re.into(),
                s.im.into(),
                s.norm().into(),
            ]);
            ok(t)
        }
        (None, Some(&[t0, h, count])) => {
            if !(count >= 1.0 && count.fract() == 0.0) {
                return Err(Error::domain(format!("progression count must be a positive integer, got {count}")).into());
            }
            let spec = synthetic_progression(t0, h, count as usize)?;
            let s = spectral_exp_sum(&spec, big_t, big_x)?;
            let inside = spec.count_up_to(big_t);
            let closed = progression_sum_closed(t0, h, inside, big_x.ln());
            let mut t = Table::new(&["source", "T", "X", "count", "re", "im", "abs", "closed_re", "closed_im", "abs_diff"]);
            t.push(vec![
                spec.source_label.clone().into(),
                big_t.into(),
                big_x.into(),
                inside.into(),
                s.re.into(),
                s.im.into(),
                s.norm().into(),
                closed.re.into(),
                closed.im.into(),
                (s - closed).norm().into(),
            ]);
            ok(t)
        }
        _ => Err(Error::domain("give --file PATH or --progression t0,h,count (three values)").into()),
    }
}

fn heckes_cmd(t_min: f64, t_max: f64, points: usize, big_t: &[f64], big_x: &[f64]) -> Result<Built, Failure> {
    if !(t_min > 0.0 && t_max >= t_min) || points < 2 {
        return Err(Error::domain("need 0 < t_min ≤ t_max and at least 2 points").into());
    }
    let mut t = Table::new(&["T", "X", "t_at_sup", "sup"]);
    for &tt in big_t {
        for &xx in big_x {
            let p = test_function_params(tt, xx)?;
            let mut best = (t_min, f64::NEG_INFINITY);
            for k in 0..points {
                let s = t_min + (t_max - t_min) * k as f64 / (points - 1) as f64;
                let v = heckes_constant(s, &p)?;
                if v > best.1 {
                    best = (s, v);
                }
            }
            t.push(vec![tt.into(), xx.into(), best.0.into(), best.1.into()]);
        }
    }
    ok(t)
}

fn put(t: &mut Table, name: &str, r: &ex::Rational) {
    let [a, b] = exact(r);
    t.push(vec![name.to_string().into(), a, b]);
}

fn exponents_cmd(theta: &ex::Rational, theta_prime: &ex::Rational, eta: Option<&ex::Rational>) -> Result<Built, Failure> {
    let mut t = Table::new(&["name", "exact", "decimal"]);
    put(&mut t, "theta", theta);
    put(&mut t, "theta_prime", theta_prime);
    put(&mut t, "delta0", &ex::delta0(theta)?);
    put(&mut t, "delta1", &ex::delta1(theta)?);
    put(&mut t, "delta2", &ex::delta2(theta)?);
    let (lo, e1, e2) = ex::bt_exponents(theta)?;
    put(&mut t, "short_interval_threshold", &lo);
    put(&mut t, "short_interval_e1", &e1);
    put(&mut t, "short_interval_e2", &e2);
    if let Some(eta) = eta {
        put(&mut t, "eta", eta);
        put(&mut t, "mean_to_max", &ex::mean_to_max(theta, eta)?);
    }
    let r = ex::endgame_exponent(theta, theta_prime)?;
    put(&mut t, "alpha", &r.alpha);
    put(&mut t, "beta", &r.beta);
    put(&mut t, "sigma", &r.sigma);
    put(&mut t, "q", &r.q);
    let labels = [1, 2, 4, 5, 6];
    for (f, l) in r.terms.fixed.iter().zip(labels) {
        put(&mut t, &format!("term{l}"), f);
    }
    put(&mut t, "term3_slope", &r.terms.delta_slope);
    put(&mut t, "term3_offset", &r.terms.delta_offset);
    put(&mut t, "endgame", &r.exponent);
    let violations = r.dominance_violations.iter().map(|v| format!("term{v}")).collect::<Vec<_>>().join(" ");
    t.push(vec!["dominance_violations".into(), violations.into(), "".into()]);
    match &r.fixed_point {
        Some(d) => put(&mut t, "fixed_point", d),
        None => t.push(vec!["fixed_point".into(), "none".into(), "".into()]),
    }
    ok(t)
}

fn curves_cmd(kind: CurveKind, n: usize) -> Result<Built, Failure> {
    match kind {
        CurveKind::Theta => {
            let mut t = Table::new(&[
                "theta",
                "theta_decimal",
                "delta0",
                "delta0_decimal",
                "delta1",
                "delta1_decimal",
                "delta2",
                "delta2_decimal",
            ]);
            for row in ex::theta_curve(n)? {
                t.push([row.theta, row.delta0, row.delta1, row.delta2].iter().flat_map(exact).collect());
            }
            ok(t)
        }
        CurveKind::Sigma => {
            let mut t = Table::new(&[
                "sigma",
                "sigma_decimal",
                "prior_q",
                "prior_q_decimal",
                "prior_t",
                "prior_t_decimal",
                "new_q",
                "new_q_decimal",
                "new_t",
                "new_t_decimal",
            ]);
            for row in ex::sigma_curve(n)? {
                let cells = [row.sigma, row.prior.0, row.prior.1, row.new.0, row.new.1];
                t.push(cells.iter().flat_map(exact).collect());
            }
            ok(t)
        }
    }
}
