//! Closed-form moments of coherent states, the `⟨x⟩` ellipse traced under
//! fictitious time, and the Gaussian shape of the density.
//!
//! Moments `⟨n^μ⟩` are taken under `dμ`; physical expectations are the ratio
//! `⟨u|r f|u⟩/⟨u|r|u⟩`, i.e. ordinary `dV` averages.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{validate, CVec3, ParabolicPoint};

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Largest `|k·m|` accepted as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// `⟨n^μ⟩ = w^μ/(w·w)`.
pub fn expect_n(u: &CVec3) -> Result<[f64; 4]> {
    let p = validate(*u)?;
    let w = p.w();
    Ok(w.map(|c| c / p.ww()))
}

/// `⟨n^μ n^ν⟩ = (4w^μw^ν − η^{μν} w·w) / (2(w·w)²)`.
pub fn expect_nn(u: &CVec3) -> Result<[[f64; 4]; 4]> {
    let p = validate(*u)?;
    let (w, ww) = (p.w(), p.ww());
    let denom = 2.0 * ww * ww;
    let mut out = [[0.0; 4]; 4];
    for (mu, row) in out.iter_mut().enumerate() {
        for (nu, entry) in row.iter_mut().enumerate() {
            let eta = if mu == nu { METRIC[mu] } else { 0.0 };
            *entry = (4.0 * w[mu] * w[nu] - eta * ww) / denom;
        }
    }
    Ok(out)
}

/// `⟨x⟩ = 2w⃗/(w·w)`.
pub fn expect_position(u: &CVec3) -> Result<[f64; 3]> {
    let p = validate(*u)?;
    let w = p.w();
    let s = 2.0 / p.ww();
    Ok([s * w[1], s * w[2], s * w[3]])
}

/// `2w⁰/(w·w)`, the radial counterpart of [`expect_position`]; it diverges
/// at the boundary where the state tends to a plane wave.
pub fn expect_r(u: &CVec3) -> Result<f64> {
    let p = validate(*u)?;
    Ok(2.0 * p.w()[0] / p.ww())
}

/// The exact `dV` average `⟨n⁰n⁰⟩/⟨n⁰⟩ = (4(w⁰)² − w·w)/(2 w⁰ w·w)`.
pub fn mean_radius(u: &CVec3) -> Result<f64> {
    let p = validate(*u)?;
    let (w0, ww) = (p.w()[0], p.ww());
    Ok((4.0 * w0 * w0 - ww) / (2.0 * w0 * ww))
}

/// `u = (k + i m) e^{iθ}` with real orthogonal `k`, `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMTheta {
    k: [f64; 3],
    m: [f64; 3],
    theta: f64,
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl KMTheta {
    pub fn new(k: [f64; 3], m: [f64; 3], theta: f64) -> Result<Self> {
        let dot = dot3(&k, &m);
        if dot.abs() > ORTHOGONALITY_TOL {
            return Err(Error::NotOrthogonal { dot });
        }
        if !(k.iter().chain(&m).all(|c| c.is_finite()) && theta.is_finite()) {
            return Err(Error::InvalidArgument("k, m and theta must be finite".into()));
        }
        Ok(KMTheta { k, m, theta })
    }

    pub fn k(&self) -> [f64; 3] {
        self.k
    }

    pub fn m(&self) -> [f64; 3] {
        self.m
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        KMTheta { theta, ..*self }
    }

    pub fn u(&self) -> CVec3 {
        CVec3::from_parts(self.k, self.m).scale(Complex64::from_polar(1.0, self.theta))
    }
}

/// `⟨x⟩` written in `k, m, θ`:
/// `−4[(1+k²−m²) m cosθ + (1+m²−k²) k sinθ] / [1 − 2(k²+m²) + (k²−m²)²]`.
pub fn position_kmtheta(kmt: &KMTheta) -> [f64; 3] {
    let k2 = dot3(&kmt.k, &kmt.k);
    let m2 = dot3(&kmt.m, &kmt.m);
    let (s, c) = kmt.theta.sin_cos();
    let denom = 1.0 - 2.0 * (k2 + m2) + (k2 - m2) * (k2 - m2);
    let cm = (1.0 + k2 - m2) * c;
    let ck = (1.0 + m2 - k2) * s;
    std::array::from_fn(|i| -4.0 * (cm * kmt.m[i] + ck * kmt.k[i]) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub theta: f64,
    pub position: [f64; 3],
}

/// `⟨x⟩` at `θ₀ + 2πj/samples`, `j = 0..samples`.
pub fn trajectory(start: &KMTheta, samples: usize) -> Result<Vec<TrajectorySample>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one trajectory sample is required".into()));
    }
    (0..samples)
        .map(|j| {
            let theta = start.theta + TAU * j as f64 / samples as f64;
            let position = expect_position(&start.with_theta(theta).u()).map_err(|e| match e {
                Error::Inadmissible(violation) => Error::InadmissibleSample { theta, violation },
                other => other,
            })?;
            Ok(TrajectorySample { theta, position })
        })
        .collect()
}

/// Least-squares fit `⟨x⟩(θ) ≈ A cosθ + B sinθ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseFit {
    pub a: [f64; 3],
    pub b: [f64; 3],
    /// Largest pointwise distance between a sample and the fit.
    pub residual: f64,
}

impl EllipseFit {
    /// `(|A|, |B|)`; these are the semi-axes when `A·B = 0`.
    pub fn semi_axes(&self) -> (f64, f64) {
        (dot3(&self.a, &self.a).sqrt(), dot3(&self.b, &self.b).sqrt())
    }
}

pub fn fit_ellipse(samples: &[TrajectorySample]) -> Result<EllipseFit> {
    // Normal equations of the 2×2 problem, shared by all three coordinates.
    let (mut cc, mut cs, mut ss) = (0.0, 0.0, 0.0);
    let mut rhs_c = [0.0; 3];
    let mut rhs_s = [0.0; 3];
    for sample in samples {
        let (s, c) = sample.theta.sin_cos();
        cc += c * c;
        cs += c * s;
        ss += s * s;
        for i in 0..3 {
            rhs_c[i] += c * sample.position[i];
            rhs_s[i] += s * sample.position[i];
        }
    }
    let det = cc * ss - cs * cs;
    if det.abs() <= 1e-12 * (cc * ss).max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidArgument(
            "trajectory samples do not determine an ellipse".into(),
        ));
    }
    let a: [f64; 3] = std::array::from_fn(|i| (ss * rhs_c[i] - cs * rhs_s[i]) / det);
    let b: [f64; 3] = std::array::from_fn(|i| (cc * rhs_s[i] - cs * rhs_c[i]) / det);
    let residual = samples
        .iter()
        .map(|sample| {
            let (s, c) = sample.theta.sin_cos();
            (0..3)
                .map(|i| (sample.position[i] - a[i] * c - b[i] * s).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    Ok(EllipseFit { a, b, residual })
}

/// Parameters of the Gaussian density
/// `|ψ|² ∝ exp[−c_ξ ξ² − c_η η² + 2ξη w⊥ cos(φ − α)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityShape {
    pub c_xi: f64,
    pub c_eta: f64,
    pub w_perp: f64,
    pub alpha: f64,
    ww: f64,
}

impl DensityShape {
    /// Exponent of `|ψ|²` at `p`.
    pub fn exponent(&self, p: &ParabolicPoint) -> f64 {
        let (xi, eta) = (p.xi(), p.eta());
        -self.c_xi * xi * xi - self.c_eta * eta * eta + 2.0 * xi * eta * self.w_perp * (p.phi() - self.alpha).cos()
    }

    /// `|ψ(p)|` rebuilt from the shape and the normalization `(w·w/π)^{1/2}`.
    pub fn modulus(&self, p: &ParabolicPoint) -> f64 {
        (self.ww / PI).sqrt() * (0.5 * self.exponent(p)).exp()
    }
}

pub fn density_shape(u: &CVec3) -> Result<DensityShape> {
    let p = validate(*u)?;
    let w = p.w();
    let w_perp = w[1].hypot(w[2]);
    let alpha = if w_perp == 0.0 { 0.0 } else { w[2].atan2(w[1]) };
    Ok(DensityShape {
        c_xi: w[0] - w[3],
        c_eta: w[0] + w[3],
        w_perp,
        alpha,
        ww: p.ww(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::{amplitude_normalized, evolve, CoherentState};
    use crate::geometry::{rotate_param, Rotation};
    use crate::quadrature::{build_rule, RuleOrders};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_u(rng: &mut ChaCha8Rng) -> CVec3 {
        loop {
            let u = CVec3::from_parts(
                std::array::from_fn(|_| rng.random_range(-0.5..0.5)),
                std::array::from_fn(|_| rng.random_range(-0.5..0.5)),
            );
            if validate(u).is_ok_and(|p| p.ww() > 0.05) {
                return u;
            }
        }
    }

    fn random_kmtheta(rng: &mut ChaCha8Rng) -> KMTheta {
        loop {
            let k: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.3..0.3));
            let raw: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.3..0.3));
            let kk = dot3(&k, &k);
            let proj = dot3(&k, &raw) / kk;
            let m: [f64; 3] = std::array::from_fn(|i| raw[i] - proj * k[i]);
            let Ok(kmt) = KMTheta::new(k, m, rng.random_range(0.0..TAU)) else { continue };
            if validate(kmt.u()).is_ok() {
                return kmt;
            }
        }
    }

    #[test]
    fn moment_examples() {
        assert_eq!(expect_n(&CVec3::ZERO).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        let n = expect_n(&CVec3::new(c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0))).unwrap();
        assert!((n[0] - 1.0 / 0.6).abs() < 1e-14);
        let nn = expect_nn(&CVec3::ZERO).unwrap();
        assert_eq!(nn[0][0], 1.5);
        assert_eq!(expect_position(&CVec3::ZERO).unwrap(), [0.0; 3]);
        assert_eq!(expect_r(&CVec3::ZERO).unwrap(), 2.0);
        assert_eq!(mean_radius(&CVec3::ZERO).unwrap(), 1.5);
    }

    #[test]
    fn expect_r_near_the_boundary() {
        let rho: f64 = 0.99;
        let u = CVec3::from_real([0.0, 0.0, rho]);
        let want = 2.0 * (1.0 + rho * rho) / (1.0 - rho * rho);
        assert!((expect_r(&u).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn second_moments_are_lightlike() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let nn = expect_nn(&random_u(&mut rng)).unwrap();
            let trace: f64 = (0..4).map(|i| METRIC[i] * nn[i][i]).sum();
            assert!(trace.abs() < 1e-12 * nn[0][0]);
        }
    }

    #[test]
    fn moments_against_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..3 {
            let u = random_u(&mut rng);
            let state = CoherentState::new(u).unwrap();
            let rule = build_rule(state.param().w(), RuleOrders::default()).unwrap();
            let n = expect_n(&u).unwrap();
            let nn = expect_nn(&u).unwrap();
            let components = |p: &ParabolicPoint| [p.r(), p.x(), p.y(), p.z()];
            for mu in 0..4 {
                let got = rule.integrate_real(|p| components(p)[mu] * state.amplitude(p).norm_sqr());
                assert!((got - n[mu]).abs() < 1e-8 * n[0]);
                for nu in 0..4 {
                    let got = rule.integrate_real(|p| {
                        let v = components(p);
                        v[mu] * v[nu] * state.amplitude(p).norm_sqr()
                    });
                    assert!((got - nn[mu][nu]).abs() < 1e-8 * nn[0][0]);
                }
            }
        }
    }

    #[test]
    fn kmtheta_formula_matches_w() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..50 {
            let kmt = random_kmtheta(&mut rng);
            let direct = expect_position(&kmt.u()).unwrap();
            let formula = position_kmtheta(&kmt);
            for i in 0..3 {
                assert!((direct[i] - formula[i]).abs() < 1e-10);
            }
        }
        let spot = KMTheta::new([0.0; 3], [0.2, 0.0, 0.0], 0.0).unwrap();
        let x = expect_position(&spot.u()).unwrap();
        assert!((x[0] + 5.0 / 6.0).abs() < 1e-12 && x[1].abs() < 1e-15 && x[2].abs() < 1e-15);
    }

    #[test]
    fn kmtheta_rejects_non_orthogonal() {
        assert!(matches!(
            KMTheta::new([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], 0.0),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn trajectory_is_an_ellipse() {
        let kmt = KMTheta::new([0.15, 0.0, 0.0], [0.0, 0.1, 0.0], 0.0).unwrap();
        let samples = trajectory(&kmt, 64).unwrap();
        let fit = fit_ellipse(&samples).unwrap();
        assert!(fit.residual < 1e-10);
        assert!(dot3(&fit.a, &fit.b).abs() < 1e-12);
        // A ∥ m and B ∥ k.
        assert!(fit.a[0].abs() < 1e-12 && fit.a[2].abs() < 1e-12);
        assert!(fit.b[1].abs() < 1e-12 && fit.b[2].abs() < 1e-12);
        let a = position_kmtheta(&kmt);
        let b = position_kmtheta(&kmt.with_theta(PI / 2.0));
        for i in 0..3 {
            assert!((fit.a[i] - a[i]).abs() < 1e-12 && (fit.b[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_trajectory_is_a_segment() {
        let kmt = KMTheta::new([0.0; 3], [0.2, 0.0, 0.0], 0.0).unwrap();
        let samples = trajectory(&kmt, 4).unwrap();
        assert!((samples[0].position[0] + 5.0 / 6.0).abs() < 1e-12);
        assert!(samples[1].position.iter().all(|v| v.abs() < 1e-12));
        let fit = fit_ellipse(&trajectory(&kmt, 64).unwrap()).unwrap();
        assert!(fit.semi_axes().1 < 1e-12);
    }

    #[test]
    fn trajectory_reports_inadmissible_theta() {
        // |k| = 1.2 leaves the domain at every θ.
        let kmt = KMTheta::new([1.2, 0.0, 0.0], [0.0; 3], 0.0).unwrap();
        assert!(matches!(trajectory(&kmt, 8), Err(Error::InadmissibleSample { .. })));
    }

    #[test]
    fn full_period_returns() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let kmt = random_kmtheta(&mut rng);
        let a = position_kmtheta(&kmt);
        let b = position_kmtheta(&kmt.with_theta(kmt.theta() + TAU));
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-12);
        }
        let u = kmt.u();
        assert_eq!(evolve(&u, 0.0), u);
    }

    #[test]
    fn position_is_rotation_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..30 {
            let u = random_u(&mut rng);
            let axis = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let rot = Rotation::about_axis(axis, rng.random_range(0.0..TAU)).unwrap();
            let rotated = expect_position(&rotate_param(&u, &rot)).unwrap();
            let want = rot.apply(&expect_position(&u).unwrap());
            for i in 0..3 {
                assert!((rotated[i] - want[i]).abs() < 1e-12 * want.iter().map(|v| v.abs()).fold(1.0, f64::max));
            }
        }
    }

    #[test]
    fn density_reconstruction_and_maximum() {
        assert_eq!(
            {
                let d = density_shape(&CVec3::ZERO).unwrap();
                (d.c_xi, d.c_eta, d.w_perp, d.alpha)
            },
            (1.0, 1.0, 0.0, 0.0)
        );
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..10 {
            let u = random_u(&mut rng);
            let shape = density_shape(&u).unwrap();
            let peak = amplitude_normalized(&u, &ParabolicPoint::origin()).unwrap().norm();
            for _ in 0..100 {
                let p = ParabolicPoint::from_cartesian(
                    rng.random_range(-4.0..4.0),
                    rng.random_range(-4.0..4.0),
                    rng.random_range(-4.0..4.0),
                );
                let direct = amplitude_normalized(&u, &p).unwrap().norm();
                assert!((shape.modulus(&p) - direct).abs() < 1e-12);
                assert!(direct <= peak);
            }
        }
    }
}
