//! Parabolic eigenfunctions `⟨x|n₁n₂m⟩` of the hydrogen atom and projections
//! onto them under the light-cone measure.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::ParabolicPoint;
use crate::quadrature::{build_rule, RuleOrders};
use crate::specfun::{laguerre, log_factorial};

/// Parabolic quantum numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumNumbers {
    pub n1: u32,
    pub n2: u32,
    pub m: i32,
}

impl QuantumNumbers {
    pub const fn new(n1: u32, n2: u32, m: i32) -> Self {
        QuantumNumbers { n1, n2, m }
    }

    /// Eigenvalue of `L₅₀`, `n₁ + n₂ + |m| + 1`.
    pub fn principal(&self) -> u32 {
        self.n1 + self.n2 + self.m.unsigned_abs() + 1
    }
}

impl fmt::Display for QuantumNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{} {} {}>", self.n1, self.n2, self.m)
    }
}

/// `⟨x|n₁n₂m⟩`
///
/// `(−1)^{n₁+(m−|m|)/2} e^{imφ}/√π · e^{−(ξ²+η²)/2} (ξη)^{|m|}
///  · [(n₁+|m|)!(n₂+|m|)!/(n₁!n₂!)]^{−1/2} L_{n₁}^{|m|}(ξ²) L_{n₂}^{|m|}(η²)`
pub fn eigenstate(q: &QuantumNumbers, p: &ParabolicPoint) -> Complex64 {
    let a = q.m.unsigned_abs();
    let rho = p.xi() * p.eta();
    if a > 0 && rho == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    // (m − |m|)/2 is −|m| for negative m, whose parity equals that of |m|.
    let flips = q.n1 + if q.m < 0 { a } else { 0 };
    let sign = if flips.is_multiple_of(2) { 1.0 } else { -1.0 };
    let log_norm = 0.5
        * (log_factorial(q.n1) + log_factorial(q.n2) - log_factorial(q.n1 + a) - log_factorial(q.n2 + a));
    let log_power = if a == 0 { 0.0 } else { f64::from(a) * rho.ln() };
    let radial = (log_norm + log_power - p.r()).exp()
        * laguerre(q.n1, a, p.xi() * p.xi())
        * laguerre(q.n2, a, p.eta() * p.eta());
    Complex64::from_polar(sign * radial / PI.sqrt(), f64::from(q.m) * p.phi())
}

/// All states with `n₁, n₂ ≤ max_n` and `|m| ≤ max_abs_m`, ordered
/// lexicographically by `(m, n₁, n₂)` with `m` ascending.
pub fn basis_set(max_n: u32, max_abs_m: u32) -> Vec<QuantumNumbers> {
    let top = max_abs_m as i32;
    (-top..=top)
        .flat_map(|m| (0..=max_n).flat_map(move |n1| (0..=max_n).map(move |n2| QuantumNumbers::new(n1, n2, m))))
        .collect()
}

/// Pairwise inner products of a basis set.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    states: Vec<QuantumNumbers>,
    entries: Vec<Complex64>,
}

impl GramMatrix {
    pub fn states(&self) -> &[QuantumNumbers] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim() + j]
    }

    /// `max |G − I|` over all entries.
    pub fn max_deviation(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let id = if i == j { 1.0 } else { 0.0 };
                (self.get(i, j) - id).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `G_{qq'} = ∫ ψ*_q ψ_{q'} dμ` by light-cone quadrature.
pub fn gram_matrix(max_n: u32, max_abs_m: u32, orders: RuleOrders) -> Result<GramMatrix> {
    let states = basis_set(max_n, max_abs_m);
    let dim = states.len();
    // Each eigenfunction decays like e^{−r}, so the product carries e^{−2r}.
    let rule = build_rule(&[1.0, 0.0, 0.0, 0.0], orders)?;
    let blocks: Vec<Vec<Complex64>> = (0..orders.n_s)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![Complex64::new(0.0, 0.0); dim * dim];
            let mut values = vec![Complex64::new(0.0, 0.0); dim];
            for (p, w) in rule.points_for_s_node(i) {
                for (v, q) in values.iter_mut().zip(&states) {
                    *v = eigenstate(q, &p);
                }
                for a in 0..dim {
                    let left = values[a].conj() * w;
                    for b in a..dim {
                        acc[a * dim + b] += left * values[b];
                    }
                }
            }
            acc
        })
        .collect();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for block in &blocks {
        for (e, b) in entries.iter_mut().zip(block) {
            *e += b;
        }
    }
    for a in 0..dim {
        for b in 0..a {
            entries[a * dim + b] = entries[b * dim + a].conj();
        }
    }
    Ok(GramMatrix { states, entries })
}

/// `⟨q|ψ⟩ = ∫ ψ*_q ψ dμ`, with a rule built for the envelope `e^{−2w·n}` of the product.
pub fn project<F>(psi: F, q: &QuantumNumbers, w_envelope: &[f64; 4], orders: RuleOrders) -> Result<Complex64>
where
    F: Fn(&ParabolicPoint) -> Complex64 + Sync,
{
    let rule = build_rule(w_envelope, orders)?;
    Ok(rule.integrate(|p| eigenstate(q, p).conj() * psi(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EXACT: RuleOrders = RuleOrders::new(16, 16, 16);

    #[test]
    fn ground_state() {
        let q = QuantumNumbers::new(0, 0, 0);
        for &(x, y, z) in &[(0.0, 0.0, 0.0), (0.3, -1.0, 2.0), (-4.0, 0.5, -0.2)] {
            let p = ParabolicPoint::from_cartesian(x, y, z);
            let want = (-p.r()).exp() / PI.sqrt();
            assert!((eigenstate(&q, &p) - want).norm() < 1e-15);
        }
    }

    #[test]
    fn negative_m_sign() {
        let q = QuantumNumbers::new(0, 0, -1);
        let p = ParabolicPoint::from_parabolic(1.0, 1.0, 0.0);
        let want = -(-1f64).exp() / PI.sqrt();
        assert!((eigenstate(&q, &p) - want).norm() < 1e-15);
    }

    #[test]
    fn norm_of_excited_state() {
        let rule = build_rule(&[1.0, 0.0, 0.0, 0.0], RuleOrders::default()).unwrap();
        let q = QuantumNumbers::new(1, 0, 0);
        let norm = rule.integrate_real(|p| eigenstate(&q, p).norm_sqr());
        assert!((norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn enumeration_order() {
        let set = basis_set(1, 1);
        assert_eq!(set.len(), 12);
        assert_eq!(set[0], QuantumNumbers::new(0, 0, -1));
        assert_eq!(set[1], QuantumNumbers::new(0, 1, -1));
        assert_eq!(set[4], QuantumNumbers::new(0, 0, 0));
        assert_eq!(set[11], QuantumNumbers::new(1, 1, 1));
    }

    #[test]
    fn gram_is_identity() {
        let g = gram_matrix(3, 3, EXACT).unwrap();
        assert_eq!(g.dim(), 4 * 4 * 7);
        assert!(g.max_deviation() < 1e-8, "{}", g.max_deviation());
        // Different m: the angular sum cancels to rounding.
        let i = g.states().iter().position(|q| *q == QuantumNumbers::new(1, 2, -1)).unwrap();
        let j = g.states().iter().position(|q| *q == QuantumNumbers::new(1, 2, 2)).unwrap();
        assert!(g.get(i, j).norm() < 1e-14);
    }

    #[test]
    fn reflection_in_m() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let p = ParabolicPoint::from_cartesian(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            for m in 0..=3 {
                for n1 in 0..3 {
                    for n2 in 0..3 {
                        let plus = eigenstate(&QuantumNumbers::new(n1, n2, m), &p);
                        let minus = eigenstate(&QuantumNumbers::new(n1, n2, -m), &p);
                        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                        assert!((minus - plus.conj() * sign).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn projection_onto_eigenstates() {
        let target = QuantumNumbers::new(2, 1, -1);
        let psi = |p: &ParabolicPoint| eigenstate(&target, p);
        for q in basis_set(2, 1) {
            let c = project(psi, &q, &[1.0, 0.0, 0.0, 0.0], EXACT).unwrap();
            let want = if q == target { 1.0 } else { 0.0 };
            assert!((c - want).norm() < 1e-8, "{q}: {c}");
        }
    }

    #[test]
    fn large_quantum_numbers_stay_finite() {
        let p = ParabolicPoint::from_cartesian(3.0, 40.0, 10.0);
        let v = eigenstate(&QuantumNumbers::new(120, 90, 150), &p);
        assert!(v.re.is_finite() && v.im.is_finite());
    }
}
