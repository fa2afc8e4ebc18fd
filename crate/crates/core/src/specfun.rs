//! Special functions: associated Laguerre polynomials, integer-order Bessel
//! functions `J_n` and `I_n`, log-factorials, and residual checks for the two
//! generating-function identities the coherent-state series is summed with.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest tail estimate a truncated identity check accepts as converged.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Below this |x| the Bessel functions are summed as power series.
pub const BESSEL_SERIES_LIMIT: f64 = 12.0;

const LOG_FACTORIAL_TABLE: usize = 1024;
const RESCALE_ABOVE: f64 = 1e250;

/// Associated Laguerre polynomial `L_n^α(x)` by upward three-term recurrence.
pub fn laguerre(n: u32, alpha: u32, x: f64) -> f64 {
    let a = f64::from(alpha);
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = f64::from(k);
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `[L_0^α(x), …, L_{n_max}^α(x)]` in one pass of the recurrence.
pub fn laguerre_sequence(n_max: u32, alpha: u32, x: f64) -> Vec<f64> {
    let a = f64::from(alpha);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(1.0 + a - x);
    for k in 1..n_max as usize {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * out[k] - (kf + a) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LOG_FACTORIAL_TABLE);
        let mut acc = 0.0;
        t.push(0.0);
        for k in 1..LOG_FACTORIAL_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`; tabulated below 1024, Stirling series above.
pub fn log_factorial(n: u32) -> f64 {
    let table = log_factorial_table();
    if let Some(v) = table.get(n as usize) {
        return *v;
    }
    let x = f64::from(n) + 1.0;
    // ln Γ(x) for x > 1000, error far below f64 resolution.
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `(n+k)!/n!`-style ratios live in log space; this is `ln C(n, k)`.
pub fn log_binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

fn power_term(order: u32, half_x: f64) -> f64 {
    // (x/2)^n / n!, signed for negative x.
    if order == 0 {
        return 1.0;
    }
    if half_x == 0.0 {
        return 0.0;
    }
    let mag = (f64::from(order) * half_x.abs().ln() - log_factorial(order)).exp();
    if half_x < 0.0 && order % 2 == 1 {
        -mag
    } else {
        mag
    }
}

fn bessel_series(order: u32, x: f64, alternating: bool) -> f64 {
    let half = 0.5 * x;
    let q = if alternating { -half * half } else { half * half };
    let mut term = power_term(order, half);
    let mut sum = term;
    let n = f64::from(order);
    for k in 1..200 {
        let kf = f64::from(k);
        term *= q / (kf * (kf + n));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn miller_start(order: u32, ax: f64) -> usize {
    let top = f64::from(order).max(ax);
    let m = (top + 20.0 + 2.0 * (40.0 * top).sqrt()).ceil() as usize;
    m + (m % 2)
}

/// Bessel function of the first kind, integer order.
pub fn bessel_j(order: u32, x: f64) -> f64 {
    let ax = x.abs();
    if ax < BESSEL_SERIES_LIMIT {
        return bessel_series(order, x, true);
    }
    // Miller's backward recurrence, normalized by J₀ + 2ΣJ_{2k} = 1.
    let start = miller_start(order, ax);
    let two_over_x = 2.0 / ax;
    let mut above = 0.0;
    let mut cur = 1e-300;
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * cur - above;
        above = cur;
        cur = below;
        // `cur` now holds index k-1.
        if k - 1 == order as usize {
            wanted = cur;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE_ABOVE {
            cur /= RESCALE_ABOVE;
            above /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
            wanted /= RESCALE_ABOVE;
        }
    }
    norm += cur;
    let value = wanted / norm;
    if x < 0.0 && order % 2 == 1 {
        -value
    } else {
        value
    }
}

/// Modified Bessel function of the first kind, integer order.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    let ax = x.abs();
    if ax < BESSEL_SERIES_LIMIT {
        return Ok(bessel_series(order, x, false));
    }
    if ax > 700.0 {
        return Err(Error::Overflow { what: "bessel_i", x });
    }
    // Backward recurrence normalized by I₀ + 2ΣI_k = e^x.
    let start = miller_start(order, ax);
    let two_over_x = 2.0 / ax;
    let mut above = 0.0;
    let mut cur = 1e-300;
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * cur + above;
        above = cur;
        cur = below;
        if k - 1 == order as usize {
            wanted = cur;
        }
        if k - 1 > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE_ABOVE {
            cur /= RESCALE_ABOVE;
            above /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
            wanted /= RESCALE_ABOVE;
        }
    }
    norm += cur;
    // Divide before multiplying by e^x to stay finite near the overflow edge.
    let value = (wanted / norm) * ax.exp();
    Ok(if x < 0.0 && order % 2 == 1 { -value } else { value })
}

/// Outcome of a truncated generating-function identity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCheck {
    pub residual: f64,
    pub tail_bound: f64,
}

fn geometric_tail(first: f64, ratio: f64) -> f64 {
    if first == 0.0 {
        0.0
    } else if ratio < 1.0 {
        first / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Residual of the bilinear Laguerre generating function (Hardy–Hille),
/// truncated at `n_terms`:
///
/// `Σ n!/Γ(n+α+1) L_n^α(x) L_n^α(y) zⁿ = (1−z)⁻¹ exp(−z(x+y)/(1−z)) (xyz)^{−α/2} I_α(2√(xyz)/(1−z))`
///
/// for real `x, y ≥ 0` and `0 ≤ z < 1`, where the `J_α` of imaginary argument
/// has been rewritten with `I_α`.
pub fn verify_hardy_hille(alpha: u32, x: f64, y: f64, z: f64, n_terms: u32) -> Result<SeriesCheck> {
    if !(x >= 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::InvalidArgument(format!("x = {x}, y = {y} must be finite and >= 0")));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::InvalidArgument(format!("z = {z} must lie in [0, 1)")));
    }
    if n_terms == 0 {
        return Err(Error::InvalidArgument("n_terms must be positive".into()));
    }

    let lx = laguerre_sequence(n_terms - 1, alpha, x);
    let ly = laguerre_sequence(n_terms - 1, alpha, y);
    let mut lhs = 0.0;
    let mut zn = 1.0;
    for n in 0..n_terms {
        let ratio = (log_factorial(n) - log_factorial(n + alpha)).exp();
        lhs += ratio * lx[n as usize] * ly[n as usize] * zn;
        zn *= z;
    }

    let one_minus = 1.0 - z;
    let xyz = x * y * z;
    let bessel_part = if xyz == 0.0 {
        one_minus.powi(-(alpha as i32)) / log_factorial(alpha).exp()
    } else {
        let arg = 2.0 * xyz.sqrt() / one_minus;
        xyz.powf(-0.5 * f64::from(alpha)) * bessel_i(alpha, arg)?
    };
    let rhs = (-z * (x + y) / one_minus).exp() / one_minus * bessel_part;

    // |L_n^α(x)| ≤ C(n+α, n) e^{x/2}
    let nf = f64::from(n_terms);
    let a = f64::from(alpha);
    let first = (log_binomial(n_terms + alpha, n_terms) - log_factorial(alpha)).exp()
        * (0.5 * (x + y)).exp()
        * z.powf(nf);
    let tail_bound = geometric_tail(first, (nf + a + 1.0) / (nf + 1.0) * z);
    if tail_bound > TAIL_TOLERANCE {
        return Err(Error::NotConverged {
            what: "Hardy-Hille sum",
            estimate: tail_bound,
            tolerance: TAIL_TOLERANCE,
        });
    }
    Ok(SeriesCheck {
        residual: (lhs - rhs).abs(),
        tail_bound,
    })
}

/// Residual of `Σ_{n=−N}^{N} tⁿ J_n(z) = exp((t − 1/t) z/2)`, using `J_{−n} = (−1)ⁿ J_n`.
pub fn verify_bessel_gen(t: Complex64, z: f64, n_terms: u32) -> Result<SeriesCheck> {
    if t.norm() == 0.0 {
        return Err(Error::InvalidArgument("t must be nonzero".into()));
    }
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!("z = {z} must be finite")));
    }
    let inv = t.inv();
    let mut lhs = Complex64::new(bessel_j(0, z), 0.0);
    let mut tp = Complex64::new(1.0, 0.0);
    let mut tm = Complex64::new(1.0, 0.0);
    for n in 1..=n_terms {
        tp *= t;
        tm *= -inv;
        lhs += (tp + tm) * bessel_j(n, z);
    }
    let rhs = ((t - inv) * (0.5 * z)).exp();

    // |J_n(z)| ≤ (|z|/2)ⁿ/n!
    let big = t.norm().max(inv.norm());
    let next = n_terms + 1;
    let first = 2.0 * (f64::from(next) * (big * 0.5 * z.abs()).ln() - log_factorial(next)).exp();
    let first = if z == 0.0 { 0.0 } else { first };
    let tail_bound = geometric_tail(first, big * 0.5 * z.abs() / (f64::from(next) + 1.0));
    if tail_bound > TAIL_TOLERANCE {
        return Err(Error::NotConverged {
            what: "Bessel generating sum",
            estimate: tail_bound,
            tolerance: TAIL_TOLERANCE,
        });
    }
    Ok(SeriesCheck {
        residual: (lhs - rhs).norm(),
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Direct series Σ_k (−1)^k C(n+α, n−k) x^k / k!, kept independent of the recurrence.
    // Returns the sum and Σ|terms|, which bounds the oracle's own rounding.
    fn laguerre_direct(n: u32, alpha: u32, x: f64) -> (f64, f64) {
        let binomial = |top: u32, k: u32| (0..k).fold(1u128, |acc, j| acc * u128::from(top - j) / u128::from(j + 1));
        let mut power_over_factorial = 1.0;
        let mut sum = 0.0;
        let mut magnitude = 0.0;
        for k in 0..=n {
            if k > 0 {
                power_over_factorial *= -x / f64::from(k);
            }
            let term = binomial(n + alpha, n - k) as f64 * power_over_factorial;
            sum += term;
            magnitude += term.abs();
        }
        (sum, magnitude)
    }

    fn bessel_i_oracle(order: u32, x: f64) -> f64 {
        // Plain power series, no switch point.
        let mut sum = 0.0;
        for k in 0..400u32 {
            let lt = f64::from(2 * k + order) * (0.5 * x).ln() - log_factorial(k) - log_factorial(k + order);
            let t = lt.exp();
            sum += t;
            if k > 10 && t < 1e-18 * sum {
                break;
            }
        }
        sum
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre(0, 5, 3.7), 1.0);
        assert_eq!(laguerre(1, 2, 1.0), 2.0);
        assert!((laguerre(2, 0, 1.0) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn laguerre_sequence_matches_single() {
        let seq = laguerre_sequence(12, 3, 4.25);
        for (n, v) in seq.iter().enumerate() {
            assert_eq!(*v, laguerre(n as u32, 3, 4.25));
        }
    }

    #[test]
    fn laguerre_matches_direct_series() {
        for n in 0..=20 {
            for alpha in 0..=10 {
                for &x in &[0.0, 0.3, 1.7, 5.5, 12.0, 25.0, 40.0] {
                    let rec = laguerre(n, alpha, x);
                    let (dir, magnitude) = laguerre_direct(n, alpha, x);
                    let scale = dir.abs().max(1.0);
                    assert!(
                        (rec - dir).abs() < 1e-10 * scale + 1e-14 * magnitude,
                        "n={n} alpha={alpha} x={x}: {rec} vs {dir}"
                    );
                }
            }
        }
    }

    #[test]
    fn laguerre_reference_values() {
        // High-precision values where the explicit sum cancels badly.
        let cases = [
            (10, 7, 12.0, 12.251_428_571_428_571),
            (7, 7, 12.0, 1.714_285_714_285_714_2),
            (20, 0, 40.0, 24_799_805.877_530_714),
        ];
        for (n, alpha, x, want) in cases {
            let got = laguerre(n, alpha, x);
            assert!((got - want).abs() < 1e-12 * want.abs(), "L_{n}^{alpha}({x}) = {got}");
        }
    }

    #[test]
    fn log_factorial_values() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        assert!((log_factorial(5) - 120f64.ln()).abs() < 1e-14);
        assert!((log_factorial(5) - 4.787491743).abs() < 1e-9);
        // Stirling branch continues the table smoothly.
        let direct: f64 = (1..=1500u32).map(|k| f64::from(k).ln()).sum();
        assert!((log_factorial(1500) - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn bessel_examples() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(3, 0.0), 0.0);
        assert!((bessel_i(0, 1.0).unwrap() - 1.266065878).abs() < 1e-9);
        let oracle: f64 = (0..30).map(|k| 0.25f64.powi(k) / log_factorial(k as u32).exp().powi(2)).sum();
        assert!((bessel_i(0, 1.0).unwrap() - oracle).abs() < 1e-15);
    }

    #[test]
    fn bessel_j_reference_values() {
        // Reference values from an independent library implementation.
        let cases = [
            (0, 1.0, 0.765_197_686_557_966_6),
            (1, 1.0, 0.440_050_585_744_933_55),
            (0, 5.0, -0.177_596_771_314_338_35),
            (2, 10.0, 0.254_630_313_685_120_6),
            (0, 20.0, 0.167_024_664_340_583_22),
            (1, 20.0, 0.066_833_124_175_849_93),
            (5, 30.0, -0.143_240_295_512_077_06),
        ];
        for (n, x, want) in cases {
            let got = bessel_j(n, x);
            assert!((got - want).abs() < 1e-13, "J_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn bessel_switch_point_is_continuous() {
        for n in 0..6 {
            let below = bessel_j(n, BESSEL_SERIES_LIMIT - 1e-13);
            let above = bessel_j(n, BESSEL_SERIES_LIMIT + 1e-13);
            assert!((below - above).abs() < 1e-12, "J_{n}: {below} vs {above}");
            let bi = bessel_i(n, BESSEL_SERIES_LIMIT - 1e-13).unwrap();
            let ai = bessel_i(n, BESSEL_SERIES_LIMIT + 1e-13).unwrap();
            assert!((bi - ai).abs() < 1e-12 * ai, "I_{n}: {bi} vs {ai}");
        }
    }

    #[test]
    fn bessel_i_matches_power_series() {
        for n in 0..8 {
            for &x in &[0.5, 3.0, 11.0, 13.0, 20.0, 45.0] {
                let got = bessel_i(n, x).unwrap();
                let want = bessel_i_oracle(n, x);
                assert!((got - want).abs() < 1e-12 * want, "I_{n}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn bessel_i_overflow_is_signalled() {
        assert!(matches!(bessel_i(0, 800.0), Err(Error::Overflow { .. })));
    }

    #[test]
    fn bessel_j_parity() {
        for n in 0..10 {
            for &x in &[0.1, 2.5, 7.0, 11.9, 12.5, 33.0] {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(bessel_j(n, -x), sign * bessel_j(n, x));
            }
        }
    }

    #[test]
    fn hardy_hille_examples() {
        let r = verify_hardy_hille(0, 1.0, 1.0, 0.5, 40).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
        let r = verify_hardy_hille(2, 0.5, 2.0, 0.3, 40).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
        let r = verify_hardy_hille(0, 0.7, 1.9, 0.0, 1).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn hardy_hille_flags_short_sum() {
        let err = verify_hardy_hille(0, 1.0, 1.0, 0.9, 5).unwrap_err();
        assert!(matches!(err, Error::NotConverged { .. }));
    }

    #[test]
    fn bessel_gen_examples() {
        let r = verify_bessel_gen(Complex64::new(1.0, 0.0), 0.0, 7).unwrap();
        assert_eq!(r.residual, 0.0);
        let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        let r = verify_bessel_gen(t, 2.0, 30).unwrap();
        assert!(r.residual < 1e-12, "{r:?}");
        let r = verify_bessel_gen(Complex64::new(0.5, 0.0), 1.0, 30).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
    }

    #[test]
    fn bessel_gen_flags_far_from_unit_circle() {
        let err = verify_bessel_gen(Complex64::new(50.0, 0.0), 5.0, 4).unwrap_err();
        assert!(matches!(err, Error::NotConverged { .. }));
    }
}
