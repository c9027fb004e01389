//! The incomplete-gamma machinery backing chi-squared tail probabilities.
//!
//! Standard series / continued-fraction evaluation of the regularized
//! incomplete gamma function, accurate to ~1e-14 over the ranges exercised
//! here; spot-checked against 30-digit reference values in the tests.

/// ln Gamma via the Lanczos approximation (g = 7, 9 coefficients).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = core::f64::consts::PI;
        return libm::log(pi / libm::sin(pi * x)) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * libm::log(2.0 * core::f64::consts::PI) + (x + 0.5) * libm::log(t) - t + libm::log(acc)
}

/// Regularized lower incomplete gamma P(a, x) by its power series.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * libm::exp(-x + a * libm::log(x) - ln_gamma(a))
}

/// Regularized upper incomplete gamma Q(a, x) by the Lentz continued
/// fraction.
fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * libm::exp(-x + a * libm::log(x) - ln_gamma(a))
}

/// Upper-tail probability of a chi-squared variable with `dof` degrees of
/// freedom exceeding `x`.
pub fn chi_squared_sf(x: f64, dof: usize) -> f64 {
    let a = dof as f64 / 2.0;
    if x <= 0.0 {
        return 1.0;
    }
    if x < a * 2.0 + 2.0 {
        (1.0 - gamma_p_series(a, x / 2.0)).clamp(0.0, 1.0)
    } else {
        gamma_q_fraction(a, x / 2.0).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        // Gamma(n) = (n-1)!
        assert!(close(ln_gamma(5.0), libm::log(24.0), 1e-13));
        assert!(ln_gamma(1.0).abs() < 1e-13);
        assert!(close(ln_gamma(0.5), libm::log(libm::sqrt(core::f64::consts::PI)), 1e-13));
    }

    #[test]
    fn chi_squared_tail_matches_reference_values() {
        // 30-digit reference values for Q(dof/2, x/2).
        assert!(close(chi_squared_sf(6.666666666666667, 1), 0.009823274507519248, 1e-12));
        assert!(close(chi_squared_sf(10.083333333333334, 3), 0.017870892893625542, 1e-12));
        assert!(close(chi_squared_sf(2.3875843454790822, 3), 0.4959499774209309, 1e-12));
        assert!(close(chi_squared_sf(96.0, 3), 1.1256303490757893e-20, 1e-10));
        assert!(close(chi_squared_sf(5.0, 10), 0.8911780189141512, 1e-12));
        assert!(close(chi_squared_sf(0.5, 1), 0.47950012218695346, 1e-12));
    }

    #[test]
    fn tail_limits() {
        assert_eq!(chi_squared_sf(0.0, 3), 1.0);
        assert_eq!(chi_squared_sf(-1.0, 3), 1.0);
        assert!(chi_squared_sf(1e4, 2) < 1e-300);
    }
}
