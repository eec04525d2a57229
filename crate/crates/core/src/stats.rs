//! Hypothesis tests used in evaluation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::special::{ln_choose, student_t_sf};

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Sample variance with the `n − 1` denominator.
pub fn sample_variance(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    (values.len() >= 2).then(|| values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64)
}

pub fn sample_sd(values: &[f64]) -> Option<f64> {
    sample_variance(values).map(libm::sqrt)
}

/// Exact one-sided binomial test: `P[X ≥ successes]` for
/// `X ~ Binomial(trials, null_p)`, summed in log space.
pub fn binomial_significance(successes: u64, trials: u64, null_p: f64) -> Result<f64> {
    if successes > trials {
        return Err(Error::OutOfRange { what: "successes above trials", value: successes as f64 });
    }
    if !(null_p > 0.0 && null_p < 1.0) {
        return Err(Error::OutOfRange { what: "null proportion", value: null_p });
    }
    if successes == 0 {
        return Ok(1.0);
    }
    let (ln_p, ln_q) = (libm::log(null_p), libm::log1p(-null_p));
    let terms: Vec<f64> =
        (successes..=trials).map(|i| ln_choose(trials, i) + i as f64 * ln_p + (trials - i) as f64 * ln_q).collect();
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| libm::exp(t - peak)).sum();
    Ok(libm::exp(peak + libm::log(sum)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

fn spread(values: &[f64], which: &'static str) -> Result<(f64, f64, f64)> {
    if values.len() < 2 {
        return Err(Error::TooFewValues { required: 2, got: values.len() });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSample("non-finite value"));
    }
    let n = values.len() as f64;
    let m = mean(values).expect("nonempty");
    let var = sample_variance(values).expect("two or more");
    if var == 0.0 {
        return Err(Error::DegenerateSample(which));
    }
    Ok((n, m, var))
}

/// Welch's unequal-variance t test, two-sided, with Welch–Satterthwaite
/// degrees of freedom.
pub fn welch_t_test(sample_a: &[f64], sample_b: &[f64]) -> Result<TTest> {
    let (na, ma, va) = spread(sample_a, "first sample has zero variance")?;
    let (nb, mb, vb) = spread(sample_b, "second sample has zero variance")?;
    let (sa, sb) = (va / na, vb / nb);
    let t = (ma - mb) / libm::sqrt(sa + sb);
    let df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let p_value = (2.0 * student_t_sf(t.abs(), df)).min(1.0);
    Ok(TTest { t, df, p_value })
}

/// One-sample t test of `H₀: mean = mu0` against `mean > mu0`.
pub fn one_sample_t_test(values: &[f64], mu0: f64) -> Result<TTest> {
    let (n, m, var) = spread(values, "sample has zero variance")?;
    let t = (m - mu0) / libm::sqrt(var / n);
    let df = n - 1.0;
    Ok(TTest { t, df, p_value: student_t_sf(t, df) })
}
