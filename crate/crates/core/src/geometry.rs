//! Complex Minkowski vectors, parabolic coordinates and the coherent-state
//! label `u` together with its four-vectors `l_u` and `w_u = Im l_u`.
//!
//! All dot products are bilinear (no conjugation) with metric `diag(+1,−1,−1,−1)`.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result, Violation};

/// Below this value of `w·w` a parameter is admissible but ill-conditioned.
pub const NEAR_BOUNDARY_WW: f64 = 1e-6;

/// `|1 + u²|` below which `l_u` is treated as singular.
pub const SINGULAR_MODULUS: f64 = 1e-14;

const ROTATION_TOLERANCE: f64 = 1e-12;

/// A complex 3-vector, used for the coherent-state label `u`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CVec3(pub [Complex64; 3]);

impl CVec3 {
    pub const ZERO: CVec3 = CVec3([Complex64::new(0.0, 0.0); 3]);

    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Self {
        CVec3([a, b, c])
    }

    pub fn from_real(v: [f64; 3]) -> Self {
        CVec3(v.map(|x| Complex64::new(x, 0.0)))
    }

    /// `k + i m`
    pub fn from_parts(re: [f64; 3], im: [f64; 3]) -> Self {
        CVec3([0, 1, 2].map(|i| Complex64::new(re[i], im[i])))
    }

    /// Bilinear dot product, no conjugation.
    pub fn dot(&self, other: &CVec3) -> Complex64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// Bilinear dot with a real vector.
    pub fn dot_real(&self, x: &[f64; 3]) -> Complex64 {
        self.0.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
    }

    /// `u²`
    pub fn square(&self) -> Complex64 {
        self.dot(self)
    }

    /// `u·u*`
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CVec3(self.0.map(|a| a * s))
    }

    pub fn conj(&self) -> Self {
        CVec3(self.0.map(|a| a.conj()))
    }

    pub fn re(&self) -> [f64; 3] {
        self.0.map(|a| a.re)
    }

    pub fn im(&self) -> [f64; 3] {
        self.0.map(|a| a.im)
    }

    pub fn max_abs_diff(&self, other: &CVec3) -> f64 {
        (0..3).map(|i| (self.0[i] - other.0[i]).norm()).fold(0.0, f64::max)
    }
}

impl fmt::Display for CVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| format_complex(*c)).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 {
        format!("{}{}i", c.re, c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

/// Parses `a`, `a+bi`, `a-bi` or `bi` (a bare `i` means ±1).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s = text.trim();
    let bad = || Error::Parse(format!("malformed complex literal `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let parse_f = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let parse_im = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_f(t),
    };
    let value = match s.strip_suffix('i') {
        None => Complex64::new(parse_f(s)?, 0.0),
        Some(body) => {
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
            match split {
                Some(k) => Complex64::new(parse_f(&body[..k])?, parse_im(&body[k..])?),
                None => Complex64::new(0.0, parse_im(body)?),
            }
        }
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

impl FromStr for CVec3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected 3 comma-separated components, got {} in `{s}`",
                parts.len()
            )));
        }
        Ok(CVec3([
            parse_complex(parts[0])?,
            parse_complex(parts[1])?,
            parse_complex(parts[2])?,
        ]))
    }
}

/// A complex four-vector `(c⁰, c¹, c², c³)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector(pub [Complex64; 4]);

impl FourVector {
    pub fn new(c0: Complex64, c1: Complex64, c2: Complex64, c3: Complex64) -> Self {
        FourVector([c0, c1, c2, c3])
    }

    pub fn from_real(v: [f64; 4]) -> Self {
        FourVector(v.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn re(&self) -> [f64; 4] {
        self.0.map(|c| c.re)
    }

    pub fn im(&self) -> [f64; 4] {
        self.0.map(|c| c.im)
    }

    pub fn conj(&self) -> Self {
        FourVector(self.0.map(|c| c.conj()))
    }

    pub fn max_abs_diff(&self, other: &FourVector) -> f64 {
        (0..4).map(|i| (self.0[i] - other.0[i]).norm()).fold(0.0, f64::max)
    }
}

impl Index<usize> for FourVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for FourVector {
    type Output = FourVector;

    fn add(self, rhs: FourVector) -> FourVector {
        FourVector([0, 1, 2, 3].map(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for FourVector {
    type Output = FourVector;

    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector([0, 1, 2, 3].map(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for FourVector {
    type Output = FourVector;

    fn neg(self) -> FourVector {
        FourVector(self.0.map(|c| -c))
    }
}

impl Mul<Complex64> for FourVector {
    type Output = FourVector;

    fn mul(self, s: Complex64) -> FourVector {
        FourVector(self.0.map(|c| c * s))
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;

    fn mul(self, s: f64) -> FourVector {
        FourVector(self.0.map(|c| c * s))
    }
}

/// Minkowski product `a⁰b⁰ − a⃗·b⃗`, bilinear.
pub fn mdot(a: &FourVector, b: &FourVector) -> Complex64 {
    a.0[0] * b.0[0] - a.0[1] * b.0[1] - a.0[2] * b.0[2] - a.0[3] * b.0[3]
}

/// Minkowski product of real four-vectors.
pub fn mdot_real(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// A point of configuration space in both Cartesian and parabolic charts:
/// `x + iy = ξη e^{iφ}`, `z = (ξ² − η²)/2`, `r = (ξ² + η²)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicPoint {
    x: f64,
    y: f64,
    z: f64,
    xi: f64,
    eta: f64,
    phi: f64,
}

fn normalize_angle(phi: f64) -> f64 {
    let p = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU.
    if p >= TAU {
        0.0
    } else {
        p
    }
}

impl ParabolicPoint {
    pub fn from_cartesian(x: f64, y: f64, z: f64) -> Self {
        let rho_sq = x * x + y * y;
        let r = (rho_sq + z * z).sqrt();
        let (xi_sq, eta_sq) = if r == 0.0 {
            (0.0, 0.0)
        } else if z >= 0.0 {
            let a = r + z;
            (a, rho_sq / a)
        } else {
            let b = r - z;
            (rho_sq / b, b)
        };
        let phi = if rho_sq == 0.0 {
            0.0
        } else {
            normalize_angle(y.atan2(x))
        };
        ParabolicPoint {
            x,
            y,
            z,
            xi: xi_sq.sqrt(),
            eta: eta_sq.sqrt(),
            phi,
        }
    }

    pub fn from_parabolic(xi: f64, eta: f64, phi: f64) -> Self {
        let rho = xi * eta;
        let phi = if rho == 0.0 { 0.0 } else { normalize_angle(phi) };
        ParabolicPoint {
            x: rho * phi.cos(),
            y: rho * phi.sin(),
            z: 0.5 * (xi * xi - eta * eta),
            xi,
            eta,
            phi,
        }
    }

    pub fn origin() -> Self {
        Self::from_cartesian(0.0, 0.0, 0.0)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn r(&self) -> f64 {
        0.5 * (self.xi * self.xi + self.eta * self.eta)
    }

    pub fn cartesian(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// `n_x = (r, x, y, z)`, the forward light-like vector of a spatial point.
pub fn lightcone_vector(p: &ParabolicPoint) -> FourVector {
    FourVector::from_real([p.r(), p.x, p.y, p.z])
}

/// `l_u = (i(1 − u²)/(1 + u²), −2u/(1 + u²))`.
pub fn l_of_u(u: &CVec3) -> Result<FourVector> {
    let u2 = u.square();
    let denom = Complex64::new(1.0, 0.0) + u2;
    if denom.norm() < SINGULAR_MODULUS {
        return Err(Error::SingularParameter {
            what: "1 + u²",
            modulus: denom.norm(),
        });
    }
    let inv = denom.inv();
    let i = Complex64::i();
    let s = -2.0 * inv;
    Ok(FourVector([
        i * (1.0 - u2) * inv,
        u.0[0] * s,
        u.0[1] * s,
        u.0[2] * s,
    ]))
}

/// Inverse of [`l_of_u`]: `u = −l⃗ / (1 − i l⁰)`.
pub fn u_of_l(l: &FourVector) -> Result<CVec3> {
    let norm = mdot(l, l);
    if (norm + 1.0).norm() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "l·l = {norm} is not -1"
        )));
    }
    let denom = 1.0 - Complex64::i() * l.0[0];
    if denom.norm() < SINGULAR_MODULUS {
        return Err(Error::SingularParameter {
            what: "1 - i l⁰",
            modulus: denom.norm(),
        });
    }
    let s = -denom.inv();
    Ok(CVec3([l.0[1] * s, l.0[2] * s, l.0[3] * s]))
}

/// The closed rational form `(1 − 2uu* + u²u*²)/|1 + u²|²` of `w·w`.
pub fn admissibility_rational(u: &CVec3) -> f64 {
    let u2 = u.square();
    let uu = u.norm_sqr();
    (1.0 - 2.0 * uu + u2.norm_sqr()) / (1.0 + u2).norm_sqr()
}

/// A validated coherent-state label with its four-vectors cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CSParam {
    u: CVec3,
    l: FourVector,
    w: [f64; 4],
    ww: f64,
}

impl CSParam {
    pub fn u(&self) -> &CVec3 {
        &self.u
    }

    pub fn l(&self) -> &FourVector {
        &self.l
    }

    /// `w = Im l`
    pub fn w(&self) -> &[f64; 4] {
        &self.w
    }

    /// `w·w`
    pub fn ww(&self) -> f64 {
        self.ww
    }

    pub fn near_boundary(&self) -> bool {
        self.ww < NEAR_BOUNDARY_WW
    }
}

/// Admissibility: `w·w > 0` and `w⁰ > 0`.
pub fn validate(u: CVec3) -> Result<CSParam> {
    let l = l_of_u(&u)?;
    let w = l.im();
    let ww = mdot_real(&w, &w);
    // Written as negations so NaN is rejected too.
    if !(ww > 0.0) {
        return Err(Error::Inadmissible(Violation::NonPositiveNorm { ww }));
    }
    if !(w[0] > 0.0) {
        return Err(Error::Inadmissible(Violation::BackwardTimelike { w0: w[0] }));
    }
    Ok(CSParam { u, l, w, ww })
}

/// A proper rotation of three-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation([[f64; 3]; 3]);

impl Rotation {
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let mut deviation: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((dot - want).abs());
            }
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        deviation = deviation.max((det - 1.0).abs());
        if deviation > ROTATION_TOLERANCE {
            return Err(Error::NotRotation { deviation });
        }
        Ok(Rotation(m))
    }

    pub fn identity() -> Self {
        Rotation([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Rotation by `angle` about a unit `axis` (Rodrigues).
    pub fn about_axis(axis: [f64; 3], angle: f64) -> Result<Self> {
        let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(len > 0.0) {
            return Err(Error::InvalidArgument("rotation axis must be nonzero".into()));
        }
        let [x, y, z] = axis.map(|a| a / len);
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Rotation::new([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ])
    }

    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
    }

    pub fn apply_complex(&self, v: &CVec3) -> CVec3 {
        let m = &self.0;
        CVec3([0, 1, 2].map(|i| v.0[0] * m[i][0] + v.0[1] * m[i][1] + v.0[2] * m[i][2]))
    }
}

pub fn rotate_param(u: &CVec3, rotation: &Rotation) -> CVec3 {
    rotation.apply_complex(u)
}

pub fn rotate_point(p: &ParabolicPoint, rotation: &Rotation) -> ParabolicPoint {
    let [x, y, z] = rotation.apply(&p.cartesian());
    ParabolicPoint::from_cartesian(x, y, z)
}
