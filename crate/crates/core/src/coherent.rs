//! Coherent-state amplitudes: the closed form, the parabolic-basis series,
//! fictitious-time evolution, overlaps and the quasiclassical limit.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{
    lightcone_vector, mdot, validate, CSParam, CVec3, ParabolicPoint, SINGULAR_MODULUS,
};
use crate::quadrature::{build_rule, RuleOrders};
use crate::specfun::{laguerre_sequence, log_binomial, log_factorial};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Series parameters `λ₁, λ₂` together with the branch of their square roots.
///
/// `new` takes principal roots. `evolved` continues them along `λ → λe^{iε}`
/// so the series stays continuous in `ε` past the negative real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPair {
    lambda1: Complex64,
    lambda2: Complex64,
    sqrt1: Complex64,
    sqrt2: Complex64,
}

impl LambdaPair {
    pub fn new(lambda1: Complex64, lambda2: Complex64) -> Self {
        LambdaPair {
            lambda1,
            lambda2,
            sqrt1: lambda1.sqrt(),
            sqrt2: lambda2.sqrt(),
        }
    }

    pub fn lambda1(&self) -> Complex64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> Complex64 {
        self.lambda2
    }

    /// The product `√λ₁√λ₂` on the tracked branch.
    pub fn sqrt_product(&self) -> Complex64 {
        self.sqrt1 * self.sqrt2
    }

    pub fn modulus(&self) -> f64 {
        self.lambda1.norm().max(self.lambda2.norm())
    }

    pub fn evolved(&self, eps: f64) -> Self {
        let full = Complex64::from_polar(1.0, eps);
        let half = Complex64::from_polar(1.0, 0.5 * eps);
        LambdaPair {
            lambda1: self.lambda1 * full,
            lambda2: self.lambda2 * full,
            sqrt1: self.sqrt1 * half,
            sqrt2: self.sqrt2 * half,
        }
    }
}

/// `u = (i(λ₂−λ₁)/2, (λ₁+λ₂)/2, 0)`, so that `u·u = λ₁λ₂`.
pub fn u_of_lambdas(lp: &LambdaPair) -> CVec3 {
    CVec3::new(
        0.5 * I * (lp.lambda2 - lp.lambda1),
        0.5 * (lp.lambda1 + lp.lambda2),
        Complex64::new(0.0, 0.0),
    )
}

/// `|c₀|` relating the unnormalized closed form to the unit-norm state.
pub fn normalization(u: &CVec3) -> Result<f64> {
    let param = validate(*u)?;
    let u2 = u.square();
    if u2.norm() < SINGULAR_MODULUS {
        return Err(Error::SingularParameter {
            what: "u·u",
            modulus: u2.norm(),
        });
    }
    let one_plus = Complex64::new(1.0, 0.0) + u2;
    Ok((param.ww() * one_plus.norm_sqr() / u2.norm()).sqrt())
}

/// A unit-norm coherent state `π^{-1/2}(w·w)^{1/2} exp(i l·n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    param: CSParam,
    prefactor: f64,
}

impl CoherentState {
    pub fn new(u: CVec3) -> Result<Self> {
        Ok(Self::from_param(validate(u)?))
    }

    pub fn from_param(param: CSParam) -> Self {
        let prefactor = (param.ww() / PI).sqrt();
        CoherentState { param, prefactor }
    }

    pub fn param(&self) -> &CSParam {
        &self.param
    }

    pub fn amplitude(&self, p: &ParabolicPoint) -> Complex64 {
        let n = lightcone_vector(p);
        self.prefactor * (I * mdot(self.param.l(), &n)).exp()
    }
}

pub fn amplitude_normalized(u: &CVec3, p: &ParabolicPoint) -> Result<Complex64> {
    Ok(CoherentState::new(*u)?.amplitude(p))
}

/// Closed form of the series with unit leading coefficient:
/// `π^{-1/2} √(u·u)/(1+u·u) · exp((r(u·u−1) + 2i u·x)/(1+u·u))`.
pub fn amplitude_closed(lp: &LambdaPair, p: &ParabolicPoint) -> Result<Complex64> {
    let u = u_of_lambdas(lp);
    let u2 = u.square();
    let denom = Complex64::new(1.0, 0.0) + u2;
    if denom.norm() < SINGULAR_MODULUS {
        return Err(Error::SingularParameter {
            what: "1 + u·u",
            modulus: denom.norm(),
        });
    }
    let x = p.cartesian();
    let exponent = (p.r() * (u2 - 1.0) + 2.0 * I * u.dot_real(&x)) / denom;
    Ok(lp.sqrt_product() / denom / PI.sqrt() * exponent.exp())
}

/// Truncation controls for [`series_amplitude`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// Bound on the discarded tail.
    pub tol: f64,
    /// Largest `n = n₁ = n₂` the series may reach.
    pub max_n: u32,
    /// Largest `|m|` the series may reach.
    pub max_abs_m: u32,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            tol: 1e-13,
            max_n: 200,
            max_abs_m: 200,
        }
    }
}

/// A series value with the truncation that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Terms kept: `n < n_terms` and `|m| <= max_abs_m`.
    pub n_terms: u32,
    pub max_abs_m: u32,
    pub tail_bound: f64,
}

/// `Σ_{n,m} √λ₁√λ₂ λ₁^{n+(|m|+m)/2} λ₂^{n+(|m|−m)/2} ⟨x|n n m⟩`.
pub fn series_amplitude(lp: &LambdaPair, p: &ParabolicPoint, opts: &SeriesOptions) -> Result<Complex64> {
    Ok(series_terms(lp, p, opts, 0.0)?.value)
}

/// As [`series_amplitude`], with each `(n, m)` term carrying `e^{iε(2n+|m|+1)}`.
pub fn series_amplitude_evolved(
    lp: &LambdaPair,
    eps: f64,
    p: &ParabolicPoint,
    opts: &SeriesOptions,
) -> Result<Complex64> {
    Ok(series_terms(lp, p, opts, eps)?.value)
}

/// Truncation of the `|m|` and `n` sums from the Laguerre bound
/// `|L_n^a(x)| <= C(n+a, n) e^{x/2}`, each part kept under `tol/2`.
fn truncation(rho: f64, big_r: f64, opts: &SeriesOptions) -> Result<(u32, u32, f64)> {
    let half = 0.5 * opts.tol;
    let one_minus = 1.0 - rho * rho;
    let x = rho * big_r / one_minus;
    let ln_pre = (2.0 * rho / (one_minus * PI.sqrt())).ln();
    let ln_q = |a: u32| {
        if a == 0 {
            ln_pre
        } else if big_r == 0.0 {
            f64::NEG_INFINITY
        } else {
            ln_pre + f64::from(a) * x.ln() - log_factorial(a)
        }
    };

    // |m| tail: Σ_{a>A} q_a <= 2 q_{A+1} once x/(A+2) < 1/2.
    let mut cap = 0u32;
    let m_tail = loop {
        let bound = 2.0 * ln_q(cap + 1).exp();
        if f64::from(cap) + 2.0 > 2.0 * x && bound <= half {
            break bound;
        }
        if cap >= opts.max_abs_m {
            return Err(Error::NotConverged {
                what: "coherent-state series in |m|",
                estimate: bound,
                tolerance: opts.tol,
            });
        }
        cap += 1;
    };

    // n tail for each kept a: Σ_{n>=N} C(n+a, n) ρ^{2n} bounded geometrically.
    let ln_rho = rho.ln();
    let ln_r = big_r.ln();
    let n_tail = |n: u32| -> f64 {
        let mut total = 0.0;
        for a in 0..=cap {
            if a > 0 && big_r == 0.0 {
                break;
            }
            let ratio = f64::from(n + a + 1) / f64::from(n + 1) * rho * rho;
            if ratio >= 1.0 {
                return f64::INFINITY;
            }
            let power = if a == 0 { 0.0 } else { f64::from(a) * ln_r };
            let ln_term = log_binomial(n + a, n) + f64::from(2 * n + a + 1) * ln_rho + power
                - log_factorial(a)
                - 0.5 * PI.ln();
            let mult = if a == 0 { 1.0 } else { 2.0 };
            total += mult * ln_term.exp() / (1.0 - ratio);
        }
        total
    };
    let mut n_terms = 1u32;
    loop {
        let bound = n_tail(n_terms);
        if bound <= half {
            return Ok((n_terms, cap, m_tail + bound));
        }
        if n_terms > opts.max_n {
            return Err(Error::NotConverged {
                what: "coherent-state series in n",
                estimate: bound,
                tolerance: opts.tol,
            });
        }
        n_terms += 1;
    }
}

/// Evaluates the truncated series with termwise phases `e^{iε(2n+|m|+1)}`.
pub fn series_terms(lp: &LambdaPair, p: &ParabolicPoint, opts: &SeriesOptions, eps: f64) -> Result<SeriesValue> {
    let rho = lp.modulus();
    if rho >= 1.0 {
        return Err(Error::DivergentSeries { modulus: rho });
    }
    let zero = Complex64::new(0.0, 0.0);
    if rho == 0.0 {
        return Ok(SeriesValue {
            value: zero,
            n_terms: 0,
            max_abs_m: 0,
            tail_bound: 0.0,
        });
    }
    let big_r = p.xi() * p.eta();
    let (n_terms, cap, tail_bound) = truncation(rho, big_r, opts)?;

    let top = (n_terms - 1 + cap) as usize;
    let powers = |lambda: Complex64| {
        let mut out = Vec::with_capacity(top + 1);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..=top {
            out.push(acc);
            acc *= lambda;
        }
        out
    };
    let pow1 = powers(lp.lambda1);
    let pow2 = powers(lp.lambda2);
    let s = p.xi() * p.xi();
    let t = p.eta() * p.eta();
    let lead = lp.sqrt_product() / PI.sqrt();
    let step = Complex64::from_polar(1.0, eps);

    let mut total = zero;
    for a in 0..=cap {
        if a > 0 && big_r == 0.0 {
            break;
        }
        let ls = laguerre_sequence(n_terms - 1, a, s);
        let lt = laguerre_sequence(n_terms - 1, a, t);
        let power = if a == 0 { 0.0 } else { f64::from(a) * big_r.ln() };
        let forward = Complex64::from_polar(1.0, f64::from(a) * p.phi());
        let backward = forward.conj() * if a % 2 == 0 { 1.0 } else { -1.0 };
        let mut phase = Complex64::from_polar(1.0, eps * f64::from(a + 1));
        let mut block = zero;
        for n in 0..n_terms {
            let i = n as usize;
            let ai = a as usize;
            let magnitude = (power + log_factorial(n) - log_factorial(n + a) - p.r()).exp() * ls[i] * lt[i];
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let mut angular = pow1[i + ai] * pow2[i] * forward;
            if a > 0 {
                angular += pow1[i] * pow2[i + ai] * backward;
            }
            block += sign * magnitude * angular * phase;
            phase *= step * step;
        }
        total += block;
    }
    Ok(SeriesValue {
        value: lead * total,
        n_terms,
        max_abs_m: cap,
        tail_bound,
    })
}

/// `u → u e^{iε}`; whole periods return `u` unchanged.
pub fn evolve(u: &CVec3, eps: f64) -> CVec3 {
    let reduced = eps.rem_euclid(TAU);
    if reduced == 0.0 {
        return *u;
    }
    u.scale(Complex64::from_polar(1.0, reduced))
}

/// Closed form under fictitious-time evolution by `ε`.
pub fn amplitude_evolved(lp: &LambdaPair, eps: f64, p: &ParabolicPoint) -> Result<Complex64> {
    amplitude_closed(&lp.evolved(eps), p)
}

/// `max_j |R(x_j)/R(x₀) − 1|` with `R(x) = ψ_{ρq}(x) e^{−iq·x}`.
pub fn quasiclassical_ratio(q: &[f64; 3], rho: f64, points: &[ParabolicPoint]) -> Result<f64> {
    let len = q.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (len - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("q must be a unit vector, |q| = {len}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!("rho must lie in (0, 1), got {rho}")));
    }
    let Some((first, rest)) = points.split_first() else {
        return Err(Error::InvalidArgument("no sample points".into()));
    };
    let state = CoherentState::new(CVec3::from_real(*q).scale(Complex64::new(rho, 0.0)))?;
    let ratio = |p: &ParabolicPoint| {
        let x = p.cartesian();
        let qx = q[0] * x[0] + q[1] * x[1] + q[2] * x[2];
        state.amplitude(p) * Complex64::from_polar(1.0, -qx)
    };
    let reference = ratio(first);
    Ok(rest.iter().map(|p| (ratio(p) / reference - 1.0).norm()).fold(0.0, f64::max))
}

/// `⟨u|v⟩ = 2√(w_u·w_u)√(w_v·w_v) / (1 + l_u*·l_v)`.
pub fn overlap(u: &CVec3, v: &CVec3) -> Result<Complex64> {
    let a = validate(*u)?;
    let b = validate(*v)?;
    Ok(overlap_params(&a, &b))
}

pub fn overlap_params(a: &CSParam, b: &CSParam) -> Complex64 {
    let denom = Complex64::new(1.0, 0.0) + mdot(&a.l().conj(), b.l());
    2.0 * (a.ww() * b.ww()).sqrt() / denom
}

/// `⟨u|v⟩` by light-cone quadrature, on a rule for the envelope of `ψ_u* ψ_v`.
pub fn overlap_quadrature(u: &CVec3, v: &CVec3, orders: RuleOrders) -> Result<Complex64> {
    let a = CoherentState::new(*u)?;
    let b = CoherentState::new(*v)?;
    let wa = a.param().w();
    let wb = b.param().w();
    let w = [0.5 * (wa[0] + wb[0]), 0.5 * (wa[1] + wb[1]), 0.5 * (wa[2] + wb[2]), 0.5 * (wa[3] + wb[3])];
    let rule = build_rule(&w, orders)?;
    Ok(rule.integrate(|p| a.amplitude(p).conj() * b.amplitude(p)))
}

/// `∫|ψ_u|² dμ` by quadrature.
pub fn norm_quadrature(u: &CVec3, orders: RuleOrders) -> Result<f64> {
    let state = CoherentState::new(*u)?;
    let rule = build_rule(state.param().w(), orders)?;
    Ok(rule.integrate_real(|p| state.amplitude(p).norm_sqr()))
}

/// Unit phase `e^{iγ}` with `e^{iγ}·a = |a|/|b|·b`, for aligning two
/// representations of one state that differ by a constant phase.
pub fn relative_phase(a: Complex64, b: Complex64) -> Result<Complex64> {
    if a.norm() < SINGULAR_MODULUS || b.norm() < SINGULAR_MODULUS {
        return Err(Error::SingularParameter {
            what: "phase reference amplitude",
            modulus: a.norm().min(b.norm()),
        });
    }
    let ratio = b / a;
    Ok(ratio / ratio.norm())
}
