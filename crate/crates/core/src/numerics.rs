//! Shared numerical kernels: log-gamma, Poisson mass/tail evaluation and the
//! regularized incomplete gamma functions used for chi-square p-values.
//!
//! Everything here is plain `f64` with log-space evaluation where counts or
//! means get large, so the probability layers above never multiply raw
//! factorials.

/// Natural log of the gamma function, Lanczos approximation (g = 7, n = 9).
///
/// Absolute error on the log scale is a few ulps of the result for all
/// arguments used in this crate (x > 0).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    debug_assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1−x) = π / sin(πx).
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// ln(k!) for nonnegative integer k.
pub fn ln_factorial(k: u64) -> f64 {
    // Small arguments come up constantly in pmf loops; table them.
    const TABLE_LEN: usize = 32;
    static TABLE: std::sync::OnceLock<[f64; TABLE_LEN]> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [0.0_f64; TABLE_LEN];
        for k in 2..TABLE_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    });
    if (k as usize) < TABLE_LEN {
        table[k as usize]
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// (1 + d) ln(1 + d) - d via its power series, cancellation-free for
/// |d| <= 0.5.
fn ln1p_weighted(d: f64) -> f64 {
    debug_assert!(d.abs() <= 0.5 + 1e-12);
    // sum_{n>=2} (-1)^n d^n / (n (n-1))
    let mut acc = 0.0_f64;
    let mut power = d * d;
    let mut sign = 1.0;
    for n in 2..80u32 {
        let term = sign * power / (n as f64 * (n - 1) as f64);
        acc += term;
        if term.abs() < acc.abs() * 1e-17 + 1e-300 {
            break;
        }
        power *= d;
        sign = -sign;
    }
    acc
}

/// ln P{X = k} for X ~ Poisson(mean), cancellation-free at large arguments.
///
/// The naive k ln(mean) - mean - ln k! loses ~mean * eps absolute accuracy
/// to cancellation of huge terms; rewriting around the mode via
/// ln pmf = -mean [(1+d) ln(1+d) - d] - ln sqrt(2 pi k) - stirling(k) with
/// d = (k - mean)/mean keeps the relative error near machine precision.
pub fn ln_poisson_pmf(mean: f64, k: u64) -> f64 {
    debug_assert!(mean >= 0.0 && mean.is_finite());
    if mean == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let kf = k as f64;
    if k < 32 {
        return kf * mean.ln() - mean - ln_factorial(k);
    }
    let bracket = {
        let d = (kf - mean) / mean;
        if d.abs() <= 0.5 {
            mean * ln1p_weighted(d)
        } else {
            kf * (kf / mean).ln() - (kf - mean)
        }
    };
    // Stirling tail of ln k!: 1/(12k) - 1/(360k^3) + 1/(1260k^5) - 1/(1680k^7),
    // next term < 1e-16 for k >= 32.
    let k2 = kf * kf;
    let stirling =
        (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * k2)) / k2) / k2) / kf;
    -bracket - 0.5 * (2.0 * std::f64::consts::PI * kf).ln() - stirling
}

/// Poisson probability mass `mean^k e^{-mean} / k!`, evaluated in log space.
pub fn poisson_pmf(mean: f64, k: u64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    ln_poisson_pmf(mean, k).exp()
}

/// Upper tail `P{X >= k}` for `X ~ Poisson(mean)`, for every `k` in
/// `k_lo..=k_hi`, returned as a vector indexed by `k - k_lo`.
///
/// Each mass is evaluated directly from the stable log pmf and the tail is
/// accumulated from far above downward, so every survival value is a sum of
/// positives and tables over different ranges agree to a few ulps on their
/// shared entries.
pub fn poisson_survival_table(mean: f64, k_lo: u64, k_hi: u64) -> Vec<f64> {
    assert!(k_lo <= k_hi);
    let n = (k_hi - k_lo + 1) as usize;
    if mean == 0.0 {
        return (k_lo..=k_hi)
            .map(|k| if k == 0 { 1.0 } else { 0.0 })
            .collect();
    }
    // Extend far enough beyond k_hi that the omitted tail is below f64
    // resolution: 12 standard deviations past max(mean, k_hi) is ample.
    let spread = 12.0 * mean.sqrt() + 36.0;
    let k_top = ((k_hi as f64).max(mean) + spread).ceil() as u64;
    let mut survival = vec![0.0_f64; n];
    let mut acc = 0.0_f64;
    let mut k = k_top;
    loop {
        acc += poisson_pmf(mean, k);
        if k <= k_hi {
            survival[(k - k_lo) as usize] = acc;
        }
        if k == k_lo {
            break;
        }
        k -= 1;
    }
    for s in &mut survival {
        *s = s.min(1.0);
    }
    survival
}

/// `P{X <= k}` for `X ~ Poisson(mean)` via the complementary survival table.
pub fn poisson_cdf(mean: f64, k: u64) -> f64 {
    (1.0 - poisson_survival_table(mean, k + 1, k + 1)[0]).clamp(0.0, 1.0)
}

/// Regularized lower incomplete gamma P(a, x).
///
/// Series expansion for x < a + 1, continued fraction (modified Lentz)
/// otherwise. Accurate to ~1e-13 for the moderate arguments used in tests
/// and chi-square p-values.
pub fn reg_gamma_lower(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cont_frac(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
pub fn reg_gamma_upper(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cont_frac(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_cont_frac(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Upper-tail p-value of a chi-square statistic with `dof` degrees of freedom.
pub fn chi_square_p_value(statistic: f64, dof: usize) -> f64 {
    assert!(dof > 0);
    reg_gamma_upper(dof as f64 / 2.0, statistic.max(0.0) / 2.0)
}

/// Full binomial pmf table P{B = j} for j in 0..=n, B ~ Binomial(n, p).
///
/// Anchored at the mode in log space, extended by the exact term ratio in
/// both directions; endpoints p = 0 and p = 1 are returned exactly.
pub fn binomial_pmf_table(n: u64, p: f64) -> Vec<f64> {
    assert!((0.0..=1.0).contains(&p), "p must be in [0,1], got {p}");
    let len = (n + 1) as usize;
    let mut table = vec![0.0_f64; len];
    if p == 0.0 {
        table[0] = 1.0;
        return table;
    }
    if p == 1.0 {
        table[len - 1] = 1.0;
        return table;
    }
    let nf = n as f64;
    let mode = (((nf + 1.0) * p).floor() as u64).min(n);
    let ln_pmf = |j: u64| -> f64 {
        ln_factorial(n) - ln_factorial(j) - ln_factorial(n - j)
            + j as f64 * p.ln()
            + (n - j) as f64 * (1.0 - p).ln()
    };
    table[mode as usize] = ln_pmf(mode).exp();
    // Upward: pmf(j+1) = pmf(j) * (n-j)/(j+1) * p/(1-p).
    let odds = p / (1.0 - p);
    for j in mode..n {
        let next = table[j as usize] * (nf - j as f64) / (j as f64 + 1.0) * odds;
        table[j as usize + 1] = next;
        if next == 0.0 {
            break;
        }
    }
    // Downward: pmf(j-1) = pmf(j) * j/(n-j+1) * (1-p)/p.
    for j in (1..=mode).rev() {
        let prev = table[j as usize] * j as f64 / (nf - j as f64 + 1.0) / odds;
        table[j as usize - 1] = prev;
        if prev == 0.0 {
            break;
        }
    }
    // The log-space anchor carries a few-1e-14 scale error that every
    // downstream mixture sum would inherit; normalizing removes it.
    let total: f64 = table.iter().sum();
    for v in &mut table {
        *v /= total;
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_factorials() {
        // Reference route: direct Kahan summation of ln(i), independent of
        // the Lanczos evaluation.
        for &n in &[1_u64, 2, 5, 10, 50, 200, 1000, 60_000] {
            let mut sum = 0.0_f64;
            let mut comp = 0.0_f64;
            for i in 2..=n {
                let y = (i as f64).ln() - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            let got = ln_factorial(n);
            assert!(
                (got - sum).abs() <= 1e-12 * sum.abs().max(1.0),
                "ln {n}! = {sum}, got {got}"
            );
        }
    }

    #[test]
    fn ln_gamma_half_integers() {
        // Γ(1/2) = sqrt(pi), Γ(3/2) = sqrt(pi)/2.
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((ln_gamma(0.5) - sqrt_pi.ln()).abs() < 1e-13);
        assert!((ln_gamma(1.5) - (sqrt_pi / 2.0).ln()).abs() < 1e-13);
    }

    #[test]
    fn poisson_pmf_edge_cases() {
        assert_eq!(poisson_pmf(0.0, 0), 1.0);
        assert_eq!(poisson_pmf(0.0, 3), 0.0);
        assert!((poisson_pmf(1.0, 0) - (-1.0_f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn poisson_pmf_large_arguments_match_reference() {
        // Independent log-gamma reference: exhaustive ln summation.
        let mean = 200.0_f64;
        let k = 200_u64;
        let mut ln_fact = 0.0_f64;
        for i in 2..=k {
            ln_fact += (i as f64).ln();
        }
        let reference = (k as f64 * mean.ln() - mean - ln_fact).exp();
        let got = poisson_pmf(mean, k);
        assert!(
            ((got - reference) / reference).abs() < 1e-12,
            "got {got}, reference {reference}"
        );
    }

    #[test]
    fn survival_table_agrees_with_direct_sums() {
        let mean = 7.3;
        let table = poisson_survival_table(mean, 0, 40);
        assert!((table[0] - 1.0).abs() < 1e-14);
        for k in 1..=40_u64 {
            let direct: f64 = 1.0 - (0..k).map(|j| poisson_pmf(mean, j)).sum::<f64>();
            assert!(
                (table[k as usize] - direct).abs() < 1e-12,
                "k={k}: table {} vs direct {direct}",
                table[k as usize]
            );
        }
    }

    #[test]
    fn survival_table_agrees_with_incomplete_gamma() {
        // P{X >= k} = P(k, mean) (regularized lower incomplete gamma).
        for &mean in &[0.5, 5.0, 130.0] {
            let k_lo = 1u64;
            let k_hi = (mean as u64 + 60).max(20);
            let table = poisson_survival_table(mean, k_lo, k_hi);
            for k in (k_lo..=k_hi).step_by(7) {
                let gamma_route = reg_gamma_lower(k as f64, mean);
                let got = table[(k - k_lo) as usize];
                assert!(
                    (got - gamma_route).abs() < 1e-11,
                    "mean={mean} k={k}: table {got} vs gamma {gamma_route}"
                );
            }
        }
    }

    #[test]
    fn binomial_table_sums_to_one_and_matches_direct_terms() {
        for &(n, p) in &[(0u64, 0.3), (1, 0.5), (12, 0.7), (200, 0.02), (5000, 0.7)] {
            let table = binomial_pmf_table(n, p);
            let total: f64 = table.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n} p={p}: sum {total}");
        }
        // Spot values against direct evaluation.
        let t = binomial_pmf_table(10, 0.25);
        let direct = |j: u64| {
            let choose = (ln_factorial(10) - ln_factorial(j) - ln_factorial(10 - j)).exp();
            choose * 0.25_f64.powi(j as i32) * 0.75_f64.powi((10 - j) as i32)
        };
        for j in 0..=10u64 {
            assert!((t[j as usize] - direct(j)).abs() < 1e-14);
        }
        // Exact endpoints.
        assert_eq!(binomial_pmf_table(7, 0.0)[0], 1.0);
        assert_eq!(binomial_pmf_table(7, 1.0)[7], 1.0);
    }

    #[test]
    fn chi_square_p_value_reference_points() {
        // Classical table values: chi2(0.95; 10) = 18.307, chi2(0.999; 24) = 51.179.
        assert!((chi_square_p_value(18.307, 10) - 0.05).abs() < 5e-4);
        assert!((chi_square_p_value(51.179, 24) - 0.001).abs() < 5e-5);
        assert!((chi_square_p_value(0.0, 5) - 1.0).abs() < 1e-14);
    }
}
