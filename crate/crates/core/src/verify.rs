//! Seeded self-verification suites behind `hcs verify`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{check_commutators, FockSpace};
use crate::basis::gram_matrix;
use crate::coherent::{
    amplitude_closed, evolve, norm_quadrature, overlap, overlap_quadrature, quasiclassical_ratio,
    relative_phase, series_amplitude, series_terms, CoherentState, LambdaPair, SeriesOptions,
};
use crate::error::{Error, Result};
use crate::geometry::{validate, CVec3, ParabolicPoint};
use crate::observables::{
    density_shape, expect_n, expect_nn, expect_position, expect_r, fit_ellipse, position_kmtheta,
    trajectory, KMTheta,
};
use crate::quadrature::{build_rule, RuleOrders};
use crate::specfun::{verify_bessel_gen, verify_hardy_hille};

pub const SCHEMA_VERSION: &str = "1";
pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Norms,
    Gram,
    Moments,
    Position,
    Ellipse,
    Series,
    Evolution,
    Commutators,
    HardyHille,
    Bessel,
    Limit,
    Overlap,
    Density,
    All,
}

impl Suite {
    pub const EACH: [Suite; 13] = [
        Suite::Norms,
        Suite::Gram,
        Suite::Moments,
        Suite::Position,
        Suite::Ellipse,
        Suite::Series,
        Suite::Evolution,
        Suite::Commutators,
        Suite::HardyHille,
        Suite::Bessel,
        Suite::Limit,
        Suite::Overlap,
        Suite::Density,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Norms => "norms",
            Suite::Gram => "gram",
            Suite::Moments => "moments",
            Suite::Position => "position",
            Suite::Ellipse => "ellipse",
            Suite::Series => "series",
            Suite::Evolution => "evolution",
            Suite::Commutators => "commutators",
            Suite::HardyHille => "hardy-hille",
            Suite::Bessel => "bessel",
            Suite::Limit => "limit",
            Suite::Overlap => "overlap",
            Suite::Density => "density",
            Suite::All => "all",
        }
    }

    fn stream(&self) -> u64 {
        Suite::EACH.iter().position(|s| s == self).unwrap_or(Suite::EACH.len()) as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Replaces every per-case tolerance when set.
    pub tol: Option<f64>,
    pub orders: RuleOrders,
    pub cutoff: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            tol: None,
            orders: RuleOrders::default(),
            cutoff: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub suite: String,
    pub case: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub rng: &'static str,
    pub seed: u64,
    pub suite: String,
    pub cases: Vec<CaseResult>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }
}

struct Cases<'a> {
    suite: Suite,
    cfg: &'a VerifyConfig,
    out: Vec<CaseResult>,
}

impl Cases<'_> {
    /// Records `value < tolerance`; errors become failing cases with a NaN value.
    fn push(&mut self, case: impl Into<String>, value: Result<f64>, tolerance: f64) {
        let tolerance = self.cfg.tol.unwrap_or(tolerance);
        let value = value.unwrap_or(f64::NAN);
        self.out.push(CaseResult {
            suite: self.suite.name().into(),
            case: case.into(),
            value,
            tolerance,
            pass: value < tolerance,
        });
    }

    /// Records a yes/no property as value 0 (holds) or 1.
    fn push_flag(&mut self, case: impl Into<String>, holds: Result<bool>) {
        let value = holds.map(|h| if h { 0.0 } else { 1.0 });
        let tolerance = 0.5;
        let value = value.unwrap_or(f64::NAN);
        self.out.push(CaseResult {
            suite: self.suite.name().into(),
            case: case.into(),
            value,
            tolerance,
            pass: value < tolerance,
        });
    }
}

pub fn suite_rng(seed: u64, suite: Suite) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite.stream());
    rng
}

fn disc(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.random::<f64>().sqrt(), rng.random_range(-PI..PI))
}

/// Admissible `u` with components in the polydisc `|u_i| <= radius` and `w·w >= min_ww`.
pub fn sample_u(rng: &mut ChaCha8Rng, radius: f64, min_ww: f64) -> CVec3 {
    loop {
        let u = CVec3::new(disc(rng, radius), disc(rng, radius), disc(rng, radius));
        if validate(u).is_ok_and(|p| p.ww() >= min_ww) {
            return u;
        }
    }
}

pub fn sample_lambdas(rng: &mut ChaCha8Rng, radius: f64) -> LambdaPair {
    LambdaPair::new(disc(rng, radius), disc(rng, radius))
}

/// Uniform in the ball of the given radius.
pub fn sample_point(rng: &mut ChaCha8Rng, radius: f64) -> ParabolicPoint {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if v.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
            return ParabolicPoint::from_cartesian(radius * v[0], radius * v[1], radius * v[2]);
        }
    }
}

/// Orthogonal `k`, `m` with admissible `u` and a random starting angle.
pub fn sample_kmtheta(rng: &mut ChaCha8Rng, scale: f64) -> KMTheta {
    loop {
        let k: [f64; 3] = std::array::from_fn(|_| rng.random_range(-scale..scale));
        let raw: [f64; 3] = std::array::from_fn(|_| rng.random_range(-scale..scale));
        let kk: f64 = k.iter().map(|c| c * c).sum();
        let proj = (0..3).map(|i| k[i] * raw[i]).sum::<f64>() / kk;
        let m: [f64; 3] = std::array::from_fn(|i| raw[i] - proj * k[i]);
        let Ok(kmt) = KMTheta::new(k, m, rng.random_range(0.0..TAU)) else { continue };
        if validate(kmt.u()).is_ok() {
            return kmt;
        }
    }
}

/// Phase reference for comparing representations that differ by a constant phase.
pub fn phase_reference() -> ParabolicPoint {
    ParabolicPoint::from_cartesian(0.0, 0.0, 1.0)
}

/// `max_p |e^{iγ}·series − closed|` with `γ` fixed at the reference point.
pub fn series_closed_gap(lp: &LambdaPair, points: &[ParabolicPoint], opts: &SeriesOptions) -> Result<f64> {
    let reference = phase_reference();
    let phase = relative_phase(series_amplitude(lp, &reference, opts)?, amplitude_closed(lp, &reference)?)?;
    points.iter().try_fold(0.0f64, |acc, p| {
        let s = series_amplitude(lp, p, opts)? * phase;
        Ok(acc.max((s - amplitude_closed(lp, p)?).norm()))
    })
}

fn u_label(u: &CVec3) -> String {
    format!("u=({u})")
}

fn norms(c: &mut Cases, rng: &mut ChaCha8Rng) {
    for _ in 0..20 {
        let u = sample_u(rng, 0.5, 0.0);
        let value = norm_quadrature(&u, c.cfg.orders).map(|n| (n - 1.0).abs());
        c.push(u_label(&u), value, 1e-8);
    }
}

fn gram(c: &mut Cases) {
    let g = gram_matrix(3, 3, c.cfg.orders);
    c.push("n1,n2<=3 |m|<=3 max |G-I|", g.map(|g| g.max_deviation()), 1e-8);
}

fn moments(c: &mut Cases, rng: &mut ChaCha8Rng) {
    for _ in 0..20 {
        let u = sample_u(rng, 0.5, 0.0);
        let value = (|| {
            let state = CoherentState::new(u)?;
            let rule = build_rule(state.param().w(), c.cfg.orders)?;
            let n = expect_n(&u)?;
            let nn = expect_nn(&u)?;
            let comps = |p: &ParabolicPoint| [p.r(), p.x(), p.y(), p.z()];
            let mut worst = 0.0f64;
            for mu in 0..4 {
                let got = rule.integrate_real(|p| comps(p)[mu] * state.amplitude(p).norm_sqr());
                worst = worst.max((got - n[mu]).abs() / n[0]);
                for nu in mu..4 {
                    let got = rule.integrate_real(|p| comps(p)[mu] * comps(p)[nu] * state.amplitude(p).norm_sqr());
                    worst = worst.max((got - nn[mu][nu]).abs() / nn[0][0]);
                }
            }
            Ok(worst)
        })();
        c.push(u_label(&u), value, 1e-6);
    }
    c.push("u=0 <n0 n0> = 1.5", expect_nn(&CVec3::ZERO).map(|nn| (nn[0][0] - 1.5).abs()), 1e-14);
}

fn position(c: &mut Cases, rng: &mut ChaCha8Rng) {
    for _ in 0..50 {
        let kmt = sample_kmtheta(rng, 0.3);
        let value = expect_position(&kmt.u()).map(|x| {
            let f = position_kmtheta(&kmt);
            (0..3).map(|i| (x[i] - f[i]).abs()).fold(0.0, f64::max)
        });
        c.push(format!("k={:?} m={:?} theta={}", kmt.k(), kmt.m(), kmt.theta()), value, 1e-10);
    }
    let spot = KMTheta::new([0.0; 3], [0.2, 0.0, 0.0], 0.0).and_then(|k| expect_position(&k.u()));
    c.push(
        "k=0 m=(0.2,0,0) theta=0 -> (-5/6,0,0)",
        spot.map(|x| (x[0] + 5.0 / 6.0).abs().max(x[1].abs()).max(x[2].abs())),
        1e-12,
    );
}

fn ellipse(c: &mut Cases, rng: &mut ChaCha8Rng) {
    for _ in 0..10 {
        let kmt = sample_kmtheta(rng, 0.3);
        let value = trajectory(&kmt, 64).and_then(|s| fit_ellipse(&s)).map(|f| f.residual);
        c.push(format!("k={:?} m={:?}", kmt.k(), kmt.m()), value, 1e-10);
    }
    let u = sample_u(rng, 0.5, 0.0);
    c.push_flag("evolve(u, 2pi) == u", Ok(evolve(&u, TAU) == u));
}

fn series(c: &mut Cases, rng: &mut ChaCha8Rng) {
    let opts = SeriesOptions::default();
    for _ in 0..20 {
        let lp = sample_lambdas(rng, 0.6);
        let points: Vec<_> = (0..50).map(|_| sample_point(rng, 5.0)).collect();
        let value = series_closed_gap(&lp, &points, &opts);
        c.push(format!("lambda=({},{})", lp.lambda1(), lp.lambda2()), value, 1e-8);
    }
}

fn evolution(c: &mut Cases, rng: &mut ChaCha8Rng) {
    let opts = SeriesOptions::default();
    for _ in 0..5 {
        let lp = sample_lambdas(rng, 0.6);
        let points: Vec<_> = (0..20).map(|_| sample_point(rng, 4.0)).collect();
        for eps in [0.3, 1.0, PI] {
            let value = points.iter().try_fold(0.0f64, |acc, p| {
                let phased = series_terms(&lp, p, &opts, eps)?.value;
                let rotated = series_amplitude(&lp.evolved(eps), p, &opts)?;
                Ok(acc.max((phased - rotated).norm()))
            });
            c.push(format!("lambda=({},{}) eps={eps}", lp.lambda1(), lp.lambda2()), value, 1e-10);
        }
    }
}

fn commutators(c: &mut Cases) {
    match check_commutators(&FockSpace::new(c.cfg.cutoff)) {
        Ok(report) => {
            for e in &report.entries {
                c.push(e.pair_name(), Ok(e.residual), 1e-10);
            }
        }
        Err(e) => c.push("cutoff", Err(e), 1e-10),
    }
}

fn hardy_hille(c: &mut Cases) {
    for (alpha, x, y, z, n) in [(0, 1.0, 1.0, 0.5, 40), (2, 0.5, 2.0, 0.3, 40), (0, 1.3, 0.7, 0.0, 1)] {
        let value = verify_hardy_hille(alpha, x, y, z, n).map(|r| r.residual);
        c.push(format!("alpha={alpha} x={x} y={y} z={z} n={n}"), value, 1e-10);
    }
}

fn bessel(c: &mut Cases) {
    let cases = [
        (Complex64::new(1.0, 0.0), 0.0, 5, 1e-15),
        (Complex64::from_polar(1.0, PI / 3.0), 2.0, 30, 1e-12),
        (Complex64::new(0.5, 0.0), 1.0, 30, 1e-10),
    ];
    for (t, z, n, tol) in cases {
        let value = verify_bessel_gen(t, z, n).map(|r| r.residual);
        c.push(format!("t={t} z={z} n={n}"), value, tol);
    }
}

/// Twenty points in the unit ball used for the plane-wave flatness test.
pub fn limit_points(rng: &mut ChaCha8Rng) -> Vec<ParabolicPoint> {
    (0..20).map(|_| sample_point(rng, 1.0)).collect()
}

fn limit(c: &mut Cases, rng: &mut ChaCha8Rng) {
    let points = limit_points(rng);
    let q = [0.0, 0.0, 1.0];
    let flat: Result<Vec<f64>> = [0.9, 0.99, 0.999].iter().map(|&rho| quasiclassical_ratio(&q, rho, &points)).collect();
    // Largest f(ρ_{k+1}) − f(ρ_k); negative when strictly decreasing.
    let value = flat.map(|f| f.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max));
    c.push("flatness decreasing over rho=0.9,0.99,0.999", value, 0.0);
    let rho: f64 = 0.99;
    let want = 2.0 * (1.0 + rho * rho) / (1.0 - rho * rho);
    c.push("<r> at rho=0.99", expect_r(&CVec3::from_real([0.0, 0.0, rho])).map(|r| (r - want).abs()), 1e-6);
}

fn overlaps(c: &mut Cases, rng: &mut ChaCha8Rng) {
    for _ in 0..10 {
        let u = sample_u(rng, 0.5, 0.0);
        let v = sample_u(rng, 0.5, 0.0);
        let value = (|| {
            let exact = overlap(&u, &v)?;
            let quad = overlap_quadrature(&u, &v, c.cfg.orders)?;
            Ok((exact - quad).norm() / exact.norm())
        })();
        c.push(format!("{} v=({v})", u_label(&u)), value, 1e-6);
    }
    let spot = overlap(&CVec3::ZERO, &CVec3::from_real([0.0, 0.5, 0.0])).map(|o| (o.norm() - 0.75).abs());
    c.push("|<0|(0,0.5,0)>| = 0.75", spot, 1e-8);
}

fn density(c: &mut Cases, rng: &mut ChaCha8Rng) {
    for _ in 0..10 {
        let u = sample_u(rng, 0.5, 0.0);
        let value = (|| {
            let shape = density_shape(&u)?;
            let state = CoherentState::new(u)?;
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let p = sample_point(rng, 5.0);
                worst = worst.max((shape.modulus(&p) - state.amplitude(&p).norm()).abs());
            }
            Ok(worst)
        })();
        c.push(format!("{} reconstruction", u_label(&u)), value, 1e-12);
        let peak = (|| {
            let state = CoherentState::new(u)?;
            let top = state.amplitude(&ParabolicPoint::origin()).norm();
            let mut highest = 0.0f64;
            for i in 0..21 {
                for j in 0..21 {
                    for k in 0..21 {
                        let at = |n: i32| -3.0 + 0.3 * f64::from(n);
                        let p = ParabolicPoint::from_cartesian(at(i), at(j), at(k));
                        highest = highest.max(state.amplitude(&p).norm());
                    }
                }
            }
            Ok(highest <= top)
        })();
        c.push_flag(format!("{} maximum at origin", u_label(&u)), peak);
    }
}

fn run_one(suite: Suite, cfg: &VerifyConfig) -> Vec<CaseResult> {
    let mut rng = suite_rng(cfg.seed, suite);
    let mut c = Cases { suite, cfg, out: Vec::new() };
    match suite {
        Suite::Norms => norms(&mut c, &mut rng),
        Suite::Gram => gram(&mut c),
        Suite::Moments => moments(&mut c, &mut rng),
        Suite::Position => position(&mut c, &mut rng),
        Suite::Ellipse => ellipse(&mut c, &mut rng),
        Suite::Series => series(&mut c, &mut rng),
        Suite::Evolution => evolution(&mut c, &mut rng),
        Suite::Commutators => commutators(&mut c),
        Suite::HardyHille => hardy_hille(&mut c),
        Suite::Bessel => bessel(&mut c),
        Suite::Limit => limit(&mut c, &mut rng),
        Suite::Overlap => overlaps(&mut c, &mut rng),
        Suite::Density => density(&mut c, &mut rng),
        Suite::All => unreachable!(),
    }
    c.out
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Report {
    let cases = match suite {
        Suite::All => Suite::EACH.iter().flat_map(|s| run_one(*s, cfg)).collect(),
        one => run_one(one, cfg),
    };
    Report {
        schema_version: SCHEMA_VERSION,
        rng: RNG_NAME,
        seed: cfg.seed,
        suite: suite.name().into(),
        cases,
    }
}
