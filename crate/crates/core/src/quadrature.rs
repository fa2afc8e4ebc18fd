//! Product quadrature over the forward light cone with the measure
//! `dμ = r⁻¹dV = ½ d(ξ²) d(η²) dφ`.
//!
//! A rule is built for a Gaussian envelope `e^{−2w·n}` with `w` forward
//! timelike. The rule variables are `s = ξ²/2` and `t = η²/2`, so that
//! `r = s + t`, `z = s − t` and `dμ = 2 ds dt dφ`. In the frame where `w` has
//! no transverse part the envelope is exactly `e^{−c_s s − c_t t}` with
//! `c_s = 2(w⁰ − w³)` and `c_t = 2(w⁰ + w³)`; that frame is reached by a
//! rotation about `z` followed by a boost along `x`, both of which leave the
//! measure invariant.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result, Violation};
use crate::geometry::{mdot_real, ParabolicPoint};

/// Largest supported Gauss–Laguerre order; beyond it Laguerre values overflow.
pub const MAX_ORDER: usize = 300;

const NEWTON_MAX_ITER: usize = 30;
const NEWTON_REL_TOL: f64 = 3e-15;
// Relative step at which a stalled iteration is sitting on rounding noise.
const NEWTON_NOISE_FLOOR: f64 = 1e-12;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd(f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd(s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd(p, a.mul_add(b, -p))
}

impl Dd {
    const ZERO: Dd = Dd(0.0, 0.0);
    const ONE: Dd = Dd(1.0, 0.0);

    fn value(self) -> f64 {
        self.0 + self.1
    }

    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.0, o.0);
        quick_two_sum(p.0, p.1 + (self.0 * o.1 + self.1 * o.0))
    }

    fn scale(self, c: f64) -> Dd {
        let p = two_prod(self.0, c);
        quick_two_sum(p.0, p.1 + self.1 * c)
    }

    fn div(self, d: f64) -> Dd {
        let q = self.0 / d;
        let r = self - two_prod(q, d);
        quick_two_sum(q, r.0 / d)
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;

    fn sub(self, o: Dd) -> Dd {
        let s = two_sum(self.0, -o.0);
        quick_two_sum(s.0, s.1 + (self.1 - o.1))
    }
}

/// An `n`-point Gauss rule for `∫₀^∞ e^{−rate·x} f(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
    rate: f64,
}

impl GaussLaguerre {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Weights with the envelope divided out, `wᵢ e^{rate·xᵢ}`, formed in log space.
    pub fn envelope_free_weights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.log_weights)
            .map(|(x, lw)| (lw + self.rate * x).exp())
            .collect()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Gauss–Laguerre nodes and weights by Newton iteration on the Laguerre recurrence.
pub fn gauss_laguerre(n: usize, rate: f64) -> Result<GaussLaguerre> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Gauss-Laguerre order {n} outside 1..={MAX_ORDER}"
        )));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidArgument(format!("rate {rate} must be positive")));
    }

    let nf = n as f64;
    // Returns (L_n(z), L_{n-1}(z)). Double-double keeps the small nodes, and
    // with them the weights, accurate to a few ulps at high order.
    let eval = |z: f64| {
        let (mut p1, mut p2) = (Dd::ONE, Dd::ZERO);
        for j in 1..=n {
            let jf = j as f64;
            let p3 = p2;
            p2 = p1;
            p1 = (two_sum(2.0 * jf - 1.0, -z).mul(p2) - p3.scale(jf - 1.0)).div(jf);
        }
        (p1.value(), p2.value())
    };

    let mut nodes: Vec<f64> = Vec::with_capacity(n);
    let mut log_weights = Vec::with_capacity(n);
    let mut z = 0.0;
    for i in 0..n {
        // Initial guesses after Numerical Recipes' gaulag.
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
            }
        };
        let mut converged = false;
        let mut best = f64::INFINITY;
        for _ in 0..NEWTON_MAX_ITER {
            let (p1, p2) = eval(z);
            let deriv = nf * (p1 - p2) / z;
            let step = p1 / deriv;
            z -= step;
            let rel = (step / z).abs();
            if rel <= NEWTON_REL_TOL || (rel >= best && best <= NEWTON_NOISE_FLOOR) {
                converged = true;
                break;
            }
            best = best.min(rel);
        }
        let previous = nodes.last().copied().unwrap_or(0.0);
        if !converged || !z.is_finite() || z <= previous {
            return Err(Error::RootFinding { index: i });
        }
        let (_, p2) = eval(z);
        // wᵢ = xᵢ / (n² L_{n−1}(xᵢ)²)
        log_weights.push(z.ln() - 2.0 * nf.ln() - 2.0 * p2.abs().ln());
        nodes.push(z);
    }

    let ln_rate = rate.ln();
    let nodes: Vec<f64> = nodes.into_iter().map(|x| x / rate).collect();
    let log_weights: Vec<f64> = log_weights.into_iter().map(|lw| lw - ln_rate).collect();
    let weights = log_weights.iter().map(|lw| lw.exp()).collect();
    Ok(GaussLaguerre {
        nodes,
        weights,
        log_weights,
        rate,
    })
}

/// Quadrature orders `(N_s, N_t, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleOrders {
    pub n_s: usize,
    pub n_t: usize,
    pub n_phi: usize,
}

impl RuleOrders {
    pub const fn new(n_s: usize, n_t: usize, n_phi: usize) -> Self {
        RuleOrders { n_s, n_t, n_phi }
    }

    pub fn doubled(&self) -> Self {
        RuleOrders::new(2 * self.n_s, 2 * self.n_t, 2 * self.n_phi)
    }

    /// `self`, `2·self`, `4·self`, … (`levels` entries).
    pub fn ladder(&self, levels: usize) -> Vec<RuleOrders> {
        std::iter::successors(Some(*self), |o| Some(o.doubled()))
            .take(levels)
            .collect()
    }
}

impl Default for RuleOrders {
    fn default() -> Self {
        RuleOrders::new(48, 48, 64)
    }
}

impl fmt::Display for RuleOrders {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.n_s, self.n_t, self.n_phi)
    }
}

impl FromStr for RuleOrders {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("malformed orders `{s}`")))?;
        match parts[..] {
            [n_s, n_t, n_phi] if n_s > 0 && n_t > 0 && n_phi > 0 => Ok(RuleOrders::new(n_s, n_t, n_phi)),
            _ => Err(Error::Parse(format!("expected three positive orders, got `{s}`"))),
        }
    }
}

/// Maps rule-frame light-cone vectors back to the physical frame:
/// an `x`-boost with velocity `β` then a rotation by `α` about `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Frame {
    cos_a: f64,
    sin_a: f64,
    gamma: f64,
    gamma_beta: f64,
}

impl Frame {
    fn to_physical(self, n: [f64; 4]) -> [f64; 3] {
        let x_boosted = self.gamma * n[1] + self.gamma_beta * n[0];
        [
            self.cos_a * x_boosted - self.sin_a * n[2],
            self.sin_a * x_boosted + self.cos_a * n[2],
            n[3],
        ]
    }
}

/// Product rule for `∫ f dμ` against the envelope `e^{−2w·n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LightConeRule {
    s_rule: GaussLaguerre,
    t_rule: GaussLaguerre,
    s_free: Vec<f64>,
    t_free: Vec<f64>,
    n_phi: usize,
    frame: Frame,
    envelope: [f64; 4],
}

/// `e^{−2w·n}` at a point.
pub fn envelope(w: &[f64; 4], p: &ParabolicPoint) -> f64 {
    let [x, y, z] = p.cartesian();
    (-2.0 * (w[0] * p.r() - w[1] * x - w[2] * y - w[3] * z)).exp()
}

/// Builds the rule for envelope vector `w`, which must be forward timelike.
pub fn build_rule(w: &[f64; 4], orders: RuleOrders) -> Result<LightConeRule> {
    if w.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument(format!("envelope vector {w:?} is not finite")));
    }
    let ww = mdot_real(w, w);
    if !(ww > 0.0) {
        return Err(Error::Inadmissible(Violation::NonPositiveNorm { ww }));
    }
    if !(w[0] > 0.0) {
        return Err(Error::Inadmissible(Violation::BackwardTimelike { w0: w[0] }));
    }
    if orders.n_phi == 0 {
        return Err(Error::InvalidArgument("angular order must be positive".into()));
    }

    let w_perp = w[1].hypot(w[2]);
    let (cos_a, sin_a) = if w_perp > 0.0 {
        (w[1] / w_perp, w[2] / w_perp)
    } else {
        (1.0, 0.0)
    };
    let beta = w_perp / w[0];
    let gamma = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
    // Boosted time component; ww + (w³)² avoids cancellation in w⁰² − w⊥².
    let w3 = w[3];
    let w0_rest = if w_perp > 0.0 { (ww + w3 * w3).sqrt() } else { w[0] };
    let (rate_s, rate_t) = if w3 >= 0.0 {
        (2.0 * ww / (w0_rest + w3), 2.0 * (w0_rest + w3))
    } else {
        (2.0 * (w0_rest - w3), 2.0 * ww / (w0_rest - w3))
    };

    let s_rule = gauss_laguerre(orders.n_s, rate_s)?;
    let t_rule = gauss_laguerre(orders.n_t, rate_t)?;
    Ok(LightConeRule {
        s_free: s_rule.envelope_free_weights(),
        t_free: t_rule.envelope_free_weights(),
        s_rule,
        t_rule,
        n_phi: orders.n_phi,
        frame: Frame {
            cos_a,
            sin_a,
            gamma,
            gamma_beta: gamma * beta,
        },
        envelope: *w,
    })
}

impl LightConeRule {
    pub fn rate_s(&self) -> f64 {
        self.s_rule.rate()
    }

    pub fn rate_t(&self) -> f64 {
        self.t_rule.rate()
    }

    pub fn s_rule(&self) -> &GaussLaguerre {
        &self.s_rule
    }

    pub fn t_rule(&self) -> &GaussLaguerre {
        &self.t_rule
    }

    pub fn orders(&self) -> RuleOrders {
        RuleOrders::new(self.s_rule.nodes.len(), self.t_rule.nodes.len(), self.n_phi)
    }

    pub fn envelope_vector(&self) -> &[f64; 4] {
        &self.envelope
    }

    pub fn len(&self) -> usize {
        self.s_rule.nodes.len() * self.t_rule.nodes.len() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn phi_weight(&self) -> f64 {
        // dμ = 2 ds dt dφ
        2.0 * TAU / self.n_phi as f64
    }

    fn point(&self, s: f64, t: f64, k: usize) -> ParabolicPoint {
        let phi = TAU * k as f64 / self.n_phi as f64;
        let rho = 2.0 * (s * t).sqrt();
        let n = [s + t, rho * phi.cos(), rho * phi.sin(), s - t];
        let [x, y, z] = self.frame.to_physical(n);
        ParabolicPoint::from_cartesian(x, y, z)
    }

    /// Nodes with their effective weights; `Σ weight·f(point)` approximates `∫ f dμ`
    /// for integrands carrying the envelope.
    pub fn points(&self) -> impl Iterator<Item = (ParabolicPoint, f64)> + '_ {
        let pw = self.phi_weight();
        self.s_rule.nodes.iter().enumerate().flat_map(move |(i, &s)| {
            self.t_rule.nodes.iter().enumerate().flat_map(move |(j, &t)| {
                let w = pw * self.s_free[i] * self.t_free[j];
                (0..self.n_phi).map(move |k| (self.point(s, t, k), w))
            })
        })
    }

    /// Nodes grouped by `s`-node, for callers that parallelize themselves.
    pub fn points_for_s_node(&self, i: usize) -> Vec<(ParabolicPoint, f64)> {
        let pw = self.phi_weight();
        let s = self.s_rule.nodes[i];
        let mut out = Vec::with_capacity(self.t_rule.nodes.len() * self.n_phi);
        for (j, &t) in self.t_rule.nodes.iter().enumerate() {
            let w = pw * self.s_free[i] * self.t_free[j];
            for k in 0..self.n_phi {
                out.push((self.point(s, t, k), w));
            }
        }
        out
    }

    /// `∫ f dμ`. The integrand is divided by the rule's envelope at each node;
    /// the per-`s`-node partial sums are combined in a fixed order.
    pub fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(&ParabolicPoint) -> Complex64 + Sync,
    {
        let pw = self.phi_weight();
        let partial: Vec<Complex64> = (0..self.s_rule.nodes.len())
            .into_par_iter()
            .map(|i| {
                let s = self.s_rule.nodes[i];
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &t) in self.t_rule.nodes.iter().enumerate() {
                    let mut ring = Complex64::new(0.0, 0.0);
                    for k in 0..self.n_phi {
                        ring += f(&self.point(s, t, k));
                    }
                    acc += ring * self.t_free[j];
                }
                acc * self.s_free[i]
            })
            .collect();
        partial.into_iter().sum::<Complex64>() * pw
    }

    pub fn integrate_real<F>(&self, f: F) -> f64
    where
        F: Fn(&ParabolicPoint) -> f64 + Sync,
    {
        self.integrate(|p| Complex64::new(f(p), 0.0)).re
    }
}

/// Result of evaluating an integral on a ladder of increasing orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub value: Complex64,
    pub est_error: f64,
    pub orders: RuleOrders,
}

/// Integrates on each rung of `ladder`; the error estimate is the last
/// successive difference. Fails when that difference exceeds `tol`.
pub fn convergence_check<F>(w: &[f64; 4], f: F, ladder: &[RuleOrders], tol: f64) -> Result<Convergence>
where
    F: Fn(&ParabolicPoint) -> Complex64 + Sync,
{
    if ladder.len() < 2 {
        return Err(Error::InvalidArgument("convergence ladder needs two or more rungs".into()));
    }
    let mut values = Vec::with_capacity(ladder.len());
    for orders in ladder {
        values.push(build_rule(w, *orders)?.integrate(&f));
    }
    let n = values.len();
    let value = values[n - 1];
    let est_error = (values[n - 1] - values[n - 2]).norm();
    if !(est_error <= tol) {
        return Err(Error::NotConverged {
            what: "light-cone quadrature",
            estimate: est_error,
            tolerance: tol,
        });
    }
    Ok(Convergence {
        value,
        est_error,
        orders: ladder[n - 1],
    })
}

/// `∫ e^{−b·n} dμ = 4π/(b·b)` for forward timelike `b`.
pub fn generating_integral(b: &[f64; 4]) -> f64 {
    4.0 * PI / mdot_real(b, b)
}
