//! Statistical tests against exact and independent references.

use num_bigint::BigInt;
use num_rational::BigRational;
use polluter_core::stats::{binomial_significance, one_sample_t_test, welch_t_test};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

fn choose(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Upper binomial tail summed in exact rational arithmetic, using the exact
/// binary value of `p`.
fn exact_tail(successes: u64, trials: u64, p: f64) -> BigRational {
    let p = BigRational::from_float(p).unwrap();
    let q = BigRational::from_integer(1.into()) - &p;
    let powers = |base: &BigRational| {
        let mut out = vec![BigRational::from_integer(1.into())];
        for _ in 0..trials {
            let next = out.last().unwrap() * base;
            out.push(next);
        }
        out
    };
    let (pp, qp) = (powers(&p), powers(&q));
    (successes..=trials)
        .map(|i| BigRational::from_integer(choose(trials, i)) * &pp[i as usize] * &qp[(trials - i) as usize])
        .fold(BigRational::from_integer(0.into()), |acc, t| acc + t)
}

#[test]
fn binomial_matches_rational_oracle() {
    let tolerance = BigRational::new(1.into(), BigInt::from(10).pow(12));
    let mut checked = 0;
    for trials in 0..=20u64 {
        for successes in 0..=trials {
            for k in 1..20 {
                let p = k as f64 / 20.0;
                let got = BigRational::from_float(binomial_significance(successes, trials, p).unwrap()).unwrap();
                let diff = got - exact_tail(successes, trials, p);
                let diff = if diff < BigRational::from_integer(0.into()) { -diff } else { diff };
                assert!(diff < tolerance, "successes={successes} trials={trials} p={p}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 231 * 19);
}

#[test]
fn binomial_is_monotone_in_successes() {
    for trials in [1u64, 7, 20, 150] {
        let ps: Vec<f64> = (0..=trials).map(|s| binomial_significance(s, trials, 0.3).unwrap()).collect();
        assert!(ps.windows(2).all(|w| w[1] <= w[0]));
    }
}

fn textbook_welch(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let stats = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        (n, m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0))
    };
    let (na, ma, va) = stats(a);
    let (nb, mb, vb) = stats(b);
    let se2 = va / na + vb / nb;
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let p = 2.0 * (1.0 - StudentsT::new(0.0, 1.0, df).unwrap().cdf(t.abs()));
    (t, df, p)
}

#[test]
fn welch_small_example() {
    let a = [1.0, 2.0, 3.0, 4.0, 5.0];
    let b = [6.0, 7.0, 8.0, 9.0, 10.0];
    let r = welch_t_test(&a, &b).unwrap();
    let (t, df, p) = textbook_welch(&a, &b);
    assert!((r.t - -5.0).abs() < 1e-12 && (r.t - t).abs() < 1e-12);
    assert!((r.df - 8.0).abs() < 1e-12 && (r.df - df).abs() < 1e-12);
    assert!((r.p_value - p).abs() < 1e-8);
    // scipy.stats.ttest_ind(a, b, equal_var=False).pvalue
    assert!((r.p_value - 0.001052825793366539).abs() < 1e-8);
}

#[test]
fn welch_matches_textbook_on_irregular_samples() {
    let samples: [(&[f64], &[f64]); 3] = [
        (&[2.1, 3.3, 1.9, 4.4, 2.8, 3.0], &[5.5, 1.2, 7.7, 3.3]),
        (&[10.0, 10.5, 9.8], &[0.1, 0.2, 30.0, 12.0, 11.0, 9.0, 4.0]),
        (&[0.001, 0.002, 0.0015], &[0.0011, 0.0019, 0.0016, 0.0012]),
    ];
    for (a, b) in samples {
        let r = welch_t_test(a, b).unwrap();
        let (t, df, p) = textbook_welch(a, b);
        assert!((r.t - t).abs() < 1e-10 * t.abs().max(1.0));
        assert!((r.df - df).abs() < 1e-10 * df);
        assert!((r.p_value - p).abs() < 1e-8, "{} vs {p}", r.p_value);
        let swapped = welch_t_test(b, a).unwrap();
        assert_eq!(swapped.t, -r.t);
        assert!((swapped.p_value - r.p_value).abs() < 1e-15);
    }
    let same = welch_t_test(&[1.0, 2.0, 4.0], &[1.0, 2.0, 4.0]).unwrap();
    assert_eq!((same.t, same.p_value), (0.0, 1.0));
}

/// Evenly spaced normal quantiles: a deterministic sample with the planted
/// mean and spread.
fn planted(mean: f64, sd: f64, n: usize) -> Vec<f64> {
    let normal = Normal::new(mean, sd).unwrap();
    (0..n).map(|i| normal.inverse_cdf((i as f64 + 0.5) / n as f64)).collect()
}

#[test]
fn planted_ages_differ_significantly() {
    let bots = planted(2.9, 1.0, 500);
    let legit = planted(4.2, 1.0, 500);
    let r = welch_t_test(&bots, &legit).unwrap();
    assert!(r.t < 0.0);
    assert!(r.p_value < 0.01);
    let (_, _, p) = textbook_welch(&bots, &legit);
    assert!((r.p_value - p).abs() < 1e-8);
}

#[test]
fn one_sample_matches_reference() {
    let mut agreement = vec![1.0; 57];
    agreement.extend(vec![0.0; 43]);
    let r = one_sample_t_test(&agreement, 0.5).unwrap();
    let n = agreement.len() as f64;
    let m = 0.57;
    let var = agreement.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    let t = (m - 0.5) / (var / n).sqrt();
    assert!((r.t - t).abs() < 1e-12);
    let p = 1.0 - StudentsT::new(0.0, 1.0, n - 1.0).unwrap().cdf(t);
    assert!((r.p_value - p).abs() < 1e-8);
}
