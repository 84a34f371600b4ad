//! Fixed points, Jacobians, closed-form 3×3 eigenvalues and fixed-point
//! classification for the Rössler flow and the sub-threshold NDS map.
//!
//! Both systems share the fixed-point structure `y = -x/a`, `u = x/a`, with
//! `x` a root of a monic quadratic:
//!
//! - Rössler: `x² - c x + a b = 0`
//! - NDS map (`F = In = 0`, no reset): `x² - k x - a v = 0`
//!
//! The step sizes `b, c, d` of the NDS map multiply whole increments, so they
//! cancel out of the fixed-point conditions entirely.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{NdsParams, RosslerParams, State3};

pub type Matrix3 = [[f64; 3]; 3];

/// Distance from the stability boundary below which a fixed point is not
/// classified.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Imaginary parts at or below this (relative to `1 + |λ|`) count as real.
const COMPLEX_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    ContinuousFlow,
    DiscreteMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    SpiralSaddle,
    SpiralRepellor,
    SpiralAttractor,
    NodeLike,
    CenterLike,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::SpiralSaddle => "spiral-saddle",
            Classification::SpiralRepellor => "spiral-repellor",
            Classification::SpiralAttractor => "spiral-attractor",
            Classification::NodeLike => "node-like",
            Classification::CenterLike => "center-like",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub point: State3,
    pub eigenvalues: [Complex64; 3],
    /// `None` when the spectrum touches the stability boundary.
    pub classification: Option<Classification>,
    pub system_kind: SystemKind,
}

/// Roots of `x² + bx + c = 0`, larger first, without cancellation.
fn monic_quadratic_roots(b: f64, c: f64) -> Result<[f64; 2]> {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return Err(Error::ComplexRoots { discriminant: disc });
    }
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * disc.sqrt());
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q, c / q) };
    Ok(if r1 >= r2 { [r1, r2] } else { [r2, r1] })
}

fn point_from_x(x: f64, a: f64) -> State3 {
    State3::new(x, -x / a, x / a)
}

/// Both equilibria of the Rössler flow, ordered by decreasing `x` (outer
/// point first).
pub fn fixed_points_rossler(p: &RosslerParams) -> Result<[State3; 2]> {
    p.validate()?;
    if p.a == 0.0 {
        return Err(Error::DegenerateParams("a must be non-zero"));
    }
    let [x1, x2] = monic_quadratic_roots(-p.c, p.a * p.b)?;
    Ok([point_from_x(x1, p.a), point_from_x(x2, p.a)])
}

/// Both fixed points of the sub-threshold NDS map with `F = In = 0`, ordered
/// by decreasing `x`.
pub fn fixed_points_nds(p: &NdsParams) -> Result<[State3; 2]> {
    p.validate()?;
    if p.a == 0.0 {
        return Err(Error::DegenerateParams("a must be non-zero"));
    }
    if p.b == 0.0 || p.c == 0.0 || p.d == 0.0 {
        return Err(Error::DegenerateParams("step sizes b, c, d must be non-zero"));
    }
    let [x1, x2] = monic_quadratic_roots(-p.k, -p.a * p.v)?;
    Ok([point_from_x(x1, p.a), point_from_x(x2, p.a)])
}

pub fn jacobian_rossler(s: State3, p: &RosslerParams) -> Matrix3 {
    [
        [0.0, -1.0, -1.0],
        [1.0, p.a, 0.0],
        [s.u, 0.0, s.x - p.c],
    ]
}

/// Linearisation of the sub-threshold branch of the NDS map.
pub fn jacobian_nds_map(s: State3, p: &NdsParams) -> Matrix3 {
    [
        [1.0, -p.b, -p.b],
        [p.c, 1.0 + p.c * p.a, 0.0],
        [-p.d * s.u, 0.0, 1.0 + p.d * (-s.x + p.k)],
    ]
}

fn trace3(m: &Matrix3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

fn det3(m: &Matrix3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Sum of the principal 2×2 minors.
fn minor_sum3(m: &Matrix3) -> f64 {
    (m[0][0] * m[1][1] - m[0][1] * m[1][0])
        + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
        + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
}

/// Infinity norm (maximum absolute row sum).
pub fn norm_inf(m: &Matrix3) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `det(m - λI)` evaluated in complex arithmetic.
pub fn char_poly_residual(m: &Matrix3, lambda: Complex64) -> Complex64 {
    let a = |i: usize, j: usize| {
        let v = Complex64::new(m[i][j], 0.0);
        if i == j {
            v - lambda
        } else {
            v
        }
    };
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
        - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

/// Real roots of `t³ + p t + q = 0` in the three-real-root case.
fn depressed_trig_roots(p: f64, q: f64) -> [f64; 3] {
    if p == 0.0 {
        let t = (-q).cbrt();
        return [t, t, t];
    }
    let r = 2.0 * (-p / 3.0).sqrt();
    let arg = ((3.0 * q) / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    [
        r * phi.cos(),
        r * (phi - 2.0 * PI / 3.0).cos(),
        r * (phi - 4.0 * PI / 3.0).cos(),
    ]
}

/// Eigenvalues of a real 3×3 matrix from its characteristic cubic, sorted by
/// descending magnitude (ties: larger real part, then positive imaginary part
/// first).
///
/// The matrix is shifted by `tr/3` first so the cubic is already depressed.
/// This keeps precision for near-identity matrices such as map Jacobians.
pub fn eigenvalues3(m: &Matrix3) -> [Complex64; 3] {
    let shift = trace3(m) / 3.0;
    let mut a = *m;
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= shift;
    }
    // det(tI - A) = t³ + p t + q since tr A = 0
    let p = minor_sum3(&a);
    let q = -det3(&a);

    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let scale = half_q * half_q + third_p.abs().powi(3);

    let mut roots: [Complex64; 3] = if p == 0.0 && q == 0.0 {
        [Complex64::new(0.0, 0.0); 3]
    } else if disc > 1e-14 * scale {
        let sq = disc.sqrt();
        let big = if half_q >= 0.0 { -half_q - sq } else { -half_q + sq };
        let u = big.cbrt();
        let v = if u == 0.0 { 0.0 } else { -third_p / u };
        let re = -(u + v) / 2.0;
        let im = (3.0f64).sqrt() / 2.0 * (u - v);
        [
            Complex64::new(u + v, 0.0),
            Complex64::new(re, im.abs()),
            Complex64::new(re, -im.abs()),
        ]
    } else {
        depressed_trig_roots(p, q).map(|t| Complex64::new(t, 0.0))
    };
    for r in roots.iter_mut() {
        r.re += shift;
    }
    roots.sort_by(|l, r| {
        r.norm()
            .total_cmp(&l.norm())
            .then(r.re.total_cmp(&l.re))
            .then(r.im.total_cmp(&l.im))
    });
    roots
}

fn is_complex(l: &Complex64) -> bool {
    l.im.abs() > COMPLEX_TOL * (1.0 + l.norm())
}

/// Classifies a fixed point from its spectrum.
///
/// Stability margin per eigenvalue is `Re λ` for a flow and `|λ| - 1` for a
/// map. With a complex pair, the pair and the remaining real eigenvalue
/// decide between repellor, attractor and saddle; a pair sitting on the
/// boundary is center-like. All-real spectra are node-like. A real
/// eigenvalue within [`BOUNDARY_TOL`] of the boundary is unclassifiable.
pub fn classify_fixed_point(eigs: &[Complex64; 3], kind: SystemKind) -> Result<Classification> {
    let margin = |l: &Complex64| match kind {
        SystemKind::ContinuousFlow => l.re,
        SystemKind::DiscreteMap => l.norm() - 1.0,
    };
    let (complex, real): (Vec<&Complex64>, Vec<&Complex64>) = eigs.iter().partition(|l| is_complex(l));
    if real.iter().any(|l| margin(l).abs() < BOUNDARY_TOL) {
        return Err(Error::Unclassifiable);
    }
    if complex.len() != 2 {
        return Ok(Classification::NodeLike);
    }
    let pair = 0.5 * (margin(complex[0]) + margin(complex[1]));
    if pair.abs() < BOUNDARY_TOL {
        return Ok(Classification::CenterLike);
    }
    let single = margin(real[0]);
    Ok(match (pair > 0.0, single > 0.0) {
        (true, true) => Classification::SpiralRepellor,
        (false, false) => Classification::SpiralAttractor,
        _ => Classification::SpiralSaddle,
    })
}

fn report(point: State3, jac: Matrix3, kind: SystemKind) -> FixedPointReport {
    let eigenvalues = eigenvalues3(&jac);
    FixedPointReport {
        point,
        eigenvalues,
        classification: classify_fixed_point(&eigenvalues, kind).ok(),
        system_kind: kind,
    }
}

pub fn analyze_rossler(p: &RosslerParams) -> Result<[FixedPointReport; 2]> {
    let pts = fixed_points_rossler(p)?;
    Ok(pts.map(|s| report(s, jacobian_rossler(s, p), SystemKind::ContinuousFlow)))
}

pub fn analyze_nds(p: &NdsParams) -> Result<[FixedPointReport; 2]> {
    let pts = fixed_points_nds(p)?;
    Ok(pts.map(|s| report(s, jacobian_nds_map(s, p), SystemKind::DiscreteMap)))
}

/// Largest eigenvalue magnitude of the Rössler Jacobian over both
/// equilibria.
pub fn max_abs_eigenvalue_rossler(p: &RosslerParams) -> Result<f64> {
    let pts = fixed_points_rossler(p)?;
    Ok(pts
        .iter()
        .flat_map(|&s| eigenvalues3(&jacobian_rossler(s, p)))
        .map(|l| l.norm())
        .fold(0.0, f64::max))
}
