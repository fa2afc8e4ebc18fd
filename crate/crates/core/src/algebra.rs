//! Four bosonic modes `a₁, a₂, b₁, b₂` on a Fock space truncated at total
//! quanta `N`, the ten quadratic SO(3,2) generators built from them, and
//! numerical checks of their commutation relations.
//!
//! A finite cutoff breaks every identity near its edge, so checks look only
//! at columns far enough below `N` for the products involved to be exact.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Occupations `(n_{a1}, n_{a2}, n_{b1}, n_{b2})` with total at most `cutoff`.
#[derive(Debug, Clone)]
pub struct FockSpace {
    cutoff: u32,
    states: Vec<[u32; 4]>,
    index: HashMap<[u32; 4], usize>,
}

impl FockSpace {
    /// States ordered by total quanta, then lexicographically by occupations.
    pub fn new(cutoff: u32) -> Self {
        let mut states = Vec::new();
        for total in 0..=cutoff {
            for n0 in 0..=total {
                for n1 in 0..=total - n0 {
                    for n2 in 0..=total - n0 - n1 {
                        states.push([n0, n1, n2, total - n0 - n1 - n2]);
                    }
                }
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        FockSpace { cutoff, states, index }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn occupation(&self, i: usize) -> [u32; 4] {
        self.states[i]
    }

    pub fn index_of(&self, occupation: &[u32; 4]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn total(&self, i: usize) -> u32 {
        self.states[i].iter().sum()
    }

    /// Mask of basis states with total quanta at most `max_total`.
    pub fn below(&self, max_total: u32) -> Vec<bool> {
        (0..self.dim()).map(|i| self.total(i) <= max_total).collect()
    }

    /// Columns where identities of the given order in ladder steps are exact.
    pub fn safe_columns(&self, order: u32) -> Vec<bool> {
        match self.cutoff.checked_sub(order) {
            Some(top) => self.below(top),
            None => vec![false; self.dim()],
        }
    }
}

/// Sparse complex matrix; each row holds `(column, value)` sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    name: String,
    dim: usize,
    rows: Vec<Vec<(usize, C)>>,
}

impl OperatorMatrix {
    pub fn zero(dim: usize) -> Self {
        OperatorMatrix {
            name: "0".into(),
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix {
            name: "I".into(),
            dim,
            rows: (0..dim).map(|i| vec![(i, ONE)]).collect(),
        }
    }

    /// Sums duplicate entries and drops exact zeros.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, C)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, C>> = vec![BTreeMap::new(); dim];
        for (i, j, v) in triplets {
            assert!(i < dim && j < dim, "entry ({i}, {j}) outside dimension {dim}");
            *acc[i].entry(j).or_insert(ZERO) += v;
        }
        let rows = acc
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, v)| *v != ZERO).collect())
            .collect();
        OperatorMatrix {
            name: String::new(),
            dim,
            rows,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => ZERO,
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, v)| (i, *j, *v)))
    }

    pub fn mul(&self, other: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, other.dim);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, C> = BTreeMap::new();
                for (k, v) in row {
                    for (j, w) in &other.rows[*k] {
                        *acc.entry(*j).or_insert(ZERO) += v * w;
                    }
                }
                acc.into_iter().filter(|(_, v)| *v != ZERO).collect()
            })
            .collect();
        OperatorMatrix {
            name: String::new(),
            dim: self.dim,
            rows,
        }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: C, other: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, other.dim);
        OperatorMatrix::from_triplets(
            self.dim,
            self.entries().chain(other.entries().map(|(i, j, v)| (i, j, c * v))),
        )
    }

    pub fn add(&self, other: &OperatorMatrix) -> OperatorMatrix {
        self.add_scaled(ONE, other)
    }

    pub fn sub(&self, other: &OperatorMatrix) -> OperatorMatrix {
        self.add_scaled(-ONE, other)
    }

    pub fn scale(&self, c: C) -> OperatorMatrix {
        OperatorMatrix::from_triplets(self.dim, self.entries().map(|(i, j, v)| (i, j, c * v)))
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix::from_triplets(self.dim, self.entries().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn commutator(&self, other: &OperatorMatrix) -> OperatorMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    /// Largest `|entry|` among the masked columns.
    pub fn max_abs_on_columns(&self, columns: &[bool]) -> f64 {
        self.entries()
            .filter(|(_, j, _)| columns[*j])
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Changes in total quanta produced by this operator.
    pub fn quanta_shifts(&self, space: &FockSpace) -> BTreeSet<i64> {
        self.entries()
            .map(|(i, j, _)| i64::from(space.total(i)) - i64::from(space.total(j)))
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<C> {
        let mut m = DMatrix::from_element(self.dim, self.dim, ZERO);
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }
}

/// Which pair of modes a ladder operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// `a_α`, `b_α` or their adjoints, `α ∈ {1, 2}`; anything leaving the space is dropped.
pub fn ladder(space: &FockSpace, which: Mode, alpha: u8, dagger: bool) -> OperatorMatrix {
    assert!(alpha == 1 || alpha == 2, "mode index must be 1 or 2");
    let slot = usize::from(alpha - 1) + if which == Mode::B { 2 } else { 0 };
    let mut triplets = Vec::new();
    for j in 0..space.dim() {
        let mut occ = space.occupation(j);
        if dagger {
            occ[slot] += 1;
            if let Some(i) = space.index_of(&occ) {
                triplets.push((i, j, C::new(f64::from(occ[slot]).sqrt(), 0.0)));
            }
        } else if occ[slot] > 0 {
            let n = occ[slot];
            occ[slot] -= 1;
            let i = space.index_of(&occ).expect("lowering stays inside the space");
            triplets.push((i, j, C::new(f64::from(n).sqrt(), 0.0)));
        }
    }
    let letter = if which == Mode::A { 'a' } else { 'b' };
    let name = if dagger { format!("{letter}{alpha}†") } else { format!("{letter}{alpha}") };
    OperatorMatrix::from_triplets(space.dim(), triplets).named(name)
}

/// `a_α†a_α` or `b_α†b_α` as an exact integer diagonal.
pub fn number(space: &FockSpace, which: Mode, alpha: u8) -> OperatorMatrix {
    assert!(alpha == 1 || alpha == 2, "mode index must be 1 or 2");
    let slot = usize::from(alpha - 1) + if which == Mode::B { 2 } else { 0 };
    let diag = (0..space.dim()).map(|i| (i, i, C::new(f64::from(space.occupation(i)[slot]), 0.0)));
    OperatorMatrix::from_triplets(space.dim(), diag)
}

/// Generator labels `(A, B)` with `A, B ∈ {0, 1, 2, 3, 5}`.
pub const GENERATOR_LABELS: [(u8, u8); 10] =
    [(1, 2), (2, 3), (3, 1), (1, 5), (2, 5), (3, 5), (1, 0), (2, 0), (3, 0), (5, 0)];

/// `η_AA` for the five labels.
pub fn eta(a: u8) -> f64 {
    match a {
        0 | 5 => 1.0,
        1..=3 => -1.0,
        _ => panic!("no generator index {a}"),
    }
}

type Pauli = [[C; 2]; 2];

fn pauli(k: u8) -> Pauli {
    match k {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => unreachable!(),
    }
}

fn mat_mul(p: &Pauli, q: &Pauli) -> Pauli {
    std::array::from_fn(|i| std::array::from_fn(|j| p[i][0] * q[0][j] + p[i][1] * q[1][j]))
}

/// `Σ_{αβ} M_{αβ} X_α Y_β`.
fn bilinear(x: &[OperatorMatrix; 2], m: &Pauli, y: &[OperatorMatrix; 2]) -> OperatorMatrix {
    let mut out = OperatorMatrix::zero(x[0].dim());
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            if m[i][j] != ZERO {
                out = out.add_scaled(m[i][j], &xi.mul(yj));
            }
        }
    }
    out
}

/// The ten generators `L_AB`, keyed by [`GENERATOR_LABELS`].
#[derive(Debug, Clone)]
pub struct Generators {
    dim: usize,
    map: BTreeMap<(u8, u8), OperatorMatrix>,
}

impl Generators {
    /// `L_AB` for any labels, using `L_BA = −L_AB` and `L_AA = 0`.
    pub fn component(&self, a: u8, b: u8) -> OperatorMatrix {
        if a == b {
            OperatorMatrix::zero(self.dim)
        } else if let Some(m) = self.map.get(&(a, b)) {
            m.clone()
        } else {
            self.map[&(b, a)].scale(-ONE)
        }
    }

    pub fn get(&self, label: (u8, u8)) -> &OperatorMatrix {
        &self.map[&label]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u8, u8), &OperatorMatrix)> {
        self.map.iter()
    }
}

pub fn generator_name(label: (u8, u8)) -> String {
    format!("L{}{}", label.0, label.1)
}

/// With `C = iσ₂`:
/// `L_ij = ½(a†σ_k a + b†σ_k b)` for cyclic `(i, j, k)`,
/// `L_i5 = −½(a†σ_iC b† − aCσ_i b)`, `L_i0 = (1/2i)(a†σ_iC b† + aCσ_i b)`,
/// `L_50 = ½(a†a + b†b + 2)`.
pub fn build_generators(space: &FockSpace) -> Generators {
    let dim = space.dim();
    let a = [ladder(space, Mode::A, 1, false), ladder(space, Mode::A, 2, false)];
    let b = [ladder(space, Mode::B, 1, false), ladder(space, Mode::B, 2, false)];
    let ad = [ladder(space, Mode::A, 1, true), ladder(space, Mode::A, 2, true)];
    let bd = [ladder(space, Mode::B, 1, true), ladder(space, Mode::B, 2, true)];
    let c = pauli(2).map(|row| row.map(|v| I * v));
    let half = C::new(0.5, 0.0);
    let mut map = BTreeMap::new();
    for (i, j, k) in [(1u8, 2u8, 3u8), (2, 3, 1), (3, 1, 2)] {
        let s = pauli(k);
        let l = bilinear(&ad, &s, &a).add(&bilinear(&bd, &s, &b)).scale(half);
        map.insert((i, j), l.named(generator_name((i, j))));
    }
    for i in 1..=3u8 {
        let raise = bilinear(&ad, &mat_mul(&pauli(i), &c), &bd);
        let lower = bilinear(&a, &mat_mul(&c, &pauli(i)), &b);
        let l5 = raise.sub(&lower).scale(-half);
        let l0 = raise.add(&lower).scale(C::new(0.0, -0.5));
        map.insert((i, 5), l5.named(generator_name((i, 5))));
        map.insert((i, 0), l0.named(generator_name((i, 0))));
    }
    let number = [(Mode::A, 1), (Mode::A, 2), (Mode::B, 1), (Mode::B, 2)]
        .iter()
        .fold(OperatorMatrix::zero(dim), |acc, &(m, k)| acc.add(&number(space, m, k)));
    let l50 = number.add_scaled(C::new(2.0, 0.0), &OperatorMatrix::identity(dim)).scale(half);
    map.insert((5, 0), l50.named(generator_name((5, 0))));
    Generators { dim, map }
}

/// `i(η_AD L_BC + η_BC L_AD − η_AC L_BD − η_BD L_AC)`, with `η` diagonal.
pub fn commutator_rhs(g: &Generators, first: (u8, u8), second: (u8, u8)) -> OperatorMatrix {
    let (a, b) = first;
    let (c, d) = second;
    let delta = |x: u8, y: u8| if x == y { eta(x) } else { 0.0 };
    let mut out = OperatorMatrix::zero(g.dim);
    for (coef, (x, y)) in [
        (delta(a, d), (b, c)),
        (delta(b, c), (a, d)),
        (-delta(a, c), (b, d)),
        (-delta(b, d), (a, c)),
    ] {
        if coef != 0.0 {
            out = out.add_scaled(I * coef, &g.component(x, y));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorEntry {
    pub first: (u8, u8),
    pub second: (u8, u8),
    pub residual: f64,
}

impl CommutatorEntry {
    pub fn pair_name(&self) -> String {
        format!("[{},{}]", generator_name(self.first), generator_name(self.second))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorReport {
    pub cutoff: u32,
    pub entries: Vec<CommutatorEntry>,
}

impl CommutatorReport {
    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }
}

impl fmt::Display for CommutatorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{} {:e}", e.pair_name(), e.residual)?;
        }
        Ok(())
    }
}

/// Residuals of all 45 generator commutators on columns with total quanta `<= N − 2`.
pub fn check_commutators(space: &FockSpace) -> Result<CommutatorReport> {
    if space.cutoff() < 4 {
        return Err(Error::InvalidArgument(format!(
            "commutator check needs cutoff >= 4, got {}",
            space.cutoff()
        )));
    }
    let g = build_generators(space);
    let safe = space.safe_columns(2);
    let pairs: Vec<((u8, u8), (u8, u8))> = GENERATOR_LABELS
        .iter()
        .enumerate()
        .flat_map(|(i, p)| GENERATOR_LABELS[i + 1..].iter().map(move |q| (*p, *q)))
        .collect();
    let entries = pairs
        .par_iter()
        .map(|&(first, second)| {
            let lhs = g.get(first).commutator(g.get(second));
            let residual = lhs.sub(&commutator_rhs(&g, first, second)).max_abs_on_columns(&safe);
            CommutatorEntry { first, second, residual }
        })
        .collect();
    Ok(CommutatorReport {
        cutoff: space.cutoff(),
        entries,
    })
}

/// `A = (a + b)/√2`, `B = (a − b)/√2` and their adjoints.
#[derive(Debug, Clone)]
pub struct AbOperators {
    pub a: [OperatorMatrix; 2],
    pub a_dag: [OperatorMatrix; 2],
    pub b: [OperatorMatrix; 2],
    pub b_dag: [OperatorMatrix; 2],
}

pub fn ab_transform(space: &FockSpace) -> AbOperators {
    let s = C::new(FRAC_1_SQRT_2, 0.0);
    let mix = |alpha: u8, sign: f64, dagger: bool, name: &str| {
        ladder(space, Mode::A, alpha, dagger)
            .add_scaled(C::new(sign, 0.0), &ladder(space, Mode::B, alpha, dagger))
            .scale(s)
            .named(format!("{name}{alpha}{}", if dagger { "†" } else { "" }))
    };
    AbOperators {
        a: [mix(1, 1.0, false, "A"), mix(2, 1.0, false, "A")],
        a_dag: [mix(1, 1.0, true, "A"), mix(2, 1.0, true, "A")],
        b: [mix(1, -1.0, false, "B"), mix(2, -1.0, false, "B")],
        b_dag: [mix(1, -1.0, true, "B"), mix(2, -1.0, true, "B")],
    }
}

/// `X_αβ = C_αC_β`, `X†_αβ` (for `α <= β`) and `Y_αβ = ½(C_αC_β† + C_β†C_α)` for one mode pair `C`.
pub fn quadratic_generators(lower: &[OperatorMatrix; 2], raise: &[OperatorMatrix; 2], tag: &str) -> Vec<OperatorMatrix> {
    let mut out = Vec::with_capacity(10);
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        out.push(lower[i].mul(&lower[j]).named(format!("X{}{}({tag})", i + 1, j + 1)));
        out.push(raise[j].mul(&raise[i]).named(format!("X†{}{}({tag})", i + 1, j + 1)));
    }
    for i in 0..2 {
        for j in 0..2 {
            let y = lower[i].mul(&raise[j]).add(&raise[j].mul(&lower[i])).scale(C::new(0.5, 0.0));
            out.push(y.named(format!("Y{}{}({tag})", i + 1, j + 1)));
        }
    }
    out
}

/// A generator written in the quadratic `A`/`B` operators.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub label: (u8, u8),
    pub coefficients: Vec<(String, C)>,
    pub residual: f64,
}

/// Least-squares coefficients expressing each `L_AB` in the twenty
/// `X, X†, Y` operators of `A` and `B`, with residuals on columns of total `<= N − 2`.
pub fn reconstruct_generators(space: &FockSpace) -> Result<Vec<Reconstruction>> {
    let ab = ab_transform(space);
    let mut basis = quadratic_generators(&ab.a, &ab.a_dag, "A");
    basis.extend(quadratic_generators(&ab.b, &ab.b_dag, "B"));
    let g = build_generators(space);
    let safe = space.safe_columns(2);

    GENERATOR_LABELS
        .iter()
        .map(|&label| {
            let target = g.get(label);
            // Rows of the system are the matrix positions any operator touches.
            let positions: BTreeSet<(usize, usize)> = basis
                .iter()
                .chain(std::iter::once(target))
                .flat_map(|m| m.entries().filter(|(_, j, _)| safe[*j]).map(|(i, j, _)| (i, j)))
                .collect();
            let positions: Vec<_> = positions.into_iter().collect();
            let design = DMatrix::from_fn(positions.len(), basis.len(), |r, k| {
                let (i, j) = positions[r];
                basis[k].get(i, j)
            });
            let rhs = DVector::from_fn(positions.len(), |r, _| {
                let (i, j) = positions[r];
                target.get(i, j)
            });
            let coef = design
                .svd(true, true)
                .solve(&rhs, 1e-12)
                .map_err(|e| Error::InvalidArgument(format!("least squares failed: {e}")))?;
            let fitted = basis
                .iter()
                .zip(coef.iter())
                .fold(OperatorMatrix::zero(space.dim()), |acc, (m, c)| acc.add_scaled(*c, m));
            let residual = fitted.sub(target).max_abs_on_columns(&safe);
            Ok(Reconstruction {
                label,
                coefficients: basis.iter().map(|m| m.name().to_string()).zip(coef.iter().copied()).collect(),
                residual,
            })
        })
        .collect()
}
