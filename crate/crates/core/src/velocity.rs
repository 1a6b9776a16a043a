//! Travel-wave velocities of single blocks and the inverse problem.
//!
//! With `lambda = rho e^{i theta}` the velocity reads
//! `c / (6E) = s e^{-2i theta} + e^{4i theta}` where `s = rho^2 + rho^-2 > 2`.
//! The velocities that no admissible `lambda` can produce form a closed
//! region bounded by the deltoid `2 e^{-i psi} + e^{2i psi}` (scaled by `6E`).

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::params::{ParameterSet, LAMBDA_TOL};

/// A plane velocity `(c1, c2)` stored as `c1 + i c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Velocity(pub C64);

impl Velocity {
    pub fn new(c1: f64, c2: f64) -> Self {
        Self(C64::new(c1, c2))
    }

    pub fn as_complex(&self) -> C64 {
        self.0
    }
}

impl From<[f64; 2]> for Velocity {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Velocity> for [f64; 2] {
    fn from(v: Velocity) -> Self {
        [v.0.re, v.0.im]
    }
}

impl fmt::Display for Velocity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0.re, self.0.im)
    }
}

/// `c = 6E (conj(lambda)^2 + 1/lambda^2 + lambda^2/conj(lambda)^2)`.
pub fn velocity(lambda: C64, energy: f64) -> Result<Velocity> {
    if lambda.norm() == 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "velocity needs a finite nonzero lambda, got {lambda}"
        )));
    }
    let l2 = lambda * lambda;
    let lb2 = l2.conj();
    Ok(Velocity(6.0 * energy * (lb2 + 1.0 / l2 + l2 / lb2)))
}

/// Velocity of every block, taken from `lambda_{4k}`.
pub fn block_velocities(p: &ParameterSet) -> Result<Vec<Velocity>> {
    (1..=p.blocks())
        .map(|k| velocity(p.lambdas()[4 * k - 1], p.energy()))
        .collect()
}

/// Largest relative spread of the four per-index velocities inside any block.
pub fn within_block_mismatch(p: &ParameterSet) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..p.blocks() {
        let vs = p.lambdas()[4 * k..4 * k + 4]
            .iter()
            .map(|l| velocity(*l, p.energy()).map(|v| v.0))
            .collect::<Result<Vec<_>>>()?;
        let scale = vs.iter().map(|v| v.norm()).fold(1e-300, f64::max);
        for v in &vs[1..] {
            worst = worst.max((v - vs[0]).norm() / scale);
        }
    }
    Ok(worst)
}

/// Discriminant-type polynomial of the deltoid, `f(u) <= 0` inside.
///
/// `f(u) = |u|^4 + 18|u|^2 - 27 - 8 Re(u^3)`; on the real axis
/// `f(r) = (r - 3)^3 (r + 1)`.
fn deltoid_poly(u: C64) -> (f64, f64) {
    let r2 = u.norm_sqr();
    let u3 = u * u * u;
    let value = r2 * r2 + 18.0 * r2 - 27.0 - 8.0 * u3.re;
    let magnitude = r2 * r2 + 18.0 * r2 + 27.0 + 8.0 * r2 * r2.sqrt();
    (value, magnitude)
}

/// True when no admissible `lambda` yields velocity `c` at energy `E`.
/// Points on the boundary count as contained.
pub fn forbidden_region_contains(c: Velocity, energy: f64) -> bool {
    let u = c.0 / (6.0 * energy);
    let (value, magnitude) = deltoid_poly(u);
    value <= 32.0 * f64::EPSILON * magnitude
}

/// Radius of the forbidden region's boundary along direction `phi`,
/// for unit energy; multiply by `E` for general energy.
///
/// Ranges from 6 (at `phi = pi/3`) to 18 (at the cusps `phi = 0, ±2pi/3`).
pub fn forbidden_radius(phi: f64) -> f64 {
    // threefold rotational symmetry plus conjugation reduce phi to [0, pi/3]
    let sector = 2.0 * PI / 3.0;
    let mut reduced = phi.rem_euclid(sector);
    if reduced > sector / 2.0 {
        reduced -= sector;
    }
    let target = reduced.abs();

    // boundary point 2e^{i a} + e^{-2i a}, a in [0, pi/3], has argument
    // increasing from 0 to pi/3
    let point = |a: f64| {
        C64::new(
            2.0 * a.cos() + (2.0 * a).cos(),
            2.0 * a.sin() - (2.0 * a).sin(),
        )
    };
    let (mut lo, mut hi) = (0.0f64, PI / 3.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if point(mid).arg() < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    6.0 * point(0.5 * (lo + hi)).norm()
}

/// Boundary radius of the forbidden region along `arg(c)` at energy `E`.
pub fn forbidden_bound(c: Velocity, energy: f64) -> f64 {
    forbidden_radius(c.0.arg()) * energy
}

/// A block's four lambdas `{lambda, -lambda, 1/conj(lambda), -1/conj(lambda)}`
/// in canonical order: `|lambda| > 1` first, then by principal argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaSet(pub [C64; 4]);

impl LambdaSet {
    pub fn from_seed(lambda: C64) -> Self {
        let l3 = 1.0 / lambda.conj();
        Self([lambda, -lambda, l3, -l3]).canonical()
    }

    pub fn canonical(mut self) -> Self {
        self.0.sort_by(|a, b| {
            let ka = (a.norm() <= 1.0, a.arg());
            let kb = (b.norm() <= 1.0, b.arg());
            ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
        });
        self
    }

    pub fn contains(&self, lambda: C64, tol: f64) -> bool {
        self.0.iter().any(|l| (l - lambda).norm() <= tol)
    }

    /// Largest distance from any member of `self` to the nearest member of `other`.
    pub fn distance(&self, other: &LambdaSet) -> f64 {
        self.0
            .iter()
            .map(|a| {
                other
                    .0
                    .iter()
                    .map(|b| (a - b).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InverseVelocity {
    /// `c` lies in the forbidden region; `bound` is the boundary radius along `arg(c)`.
    Forbidden {
        bound: f64,
    },
    Solved(LambdaSet),
}

const NEWTON_STARTS: usize = 16;
const NEWTON_MAX_ITERS: usize = 100;
const NEWTON_TARGET: f64 = 1e-12;

fn reduced_residual(s: f64, theta: f64, u: C64) -> C64 {
    s * C64::from_polar(1.0, -2.0 * theta) + C64::from_polar(1.0, 4.0 * theta) - u
}

/// Damped Newton on `(s, theta)` from a single start. Returns the final
/// iterate and its residual norm.
fn newton_from(mut s: f64, mut theta: f64, u: C64, target: f64) -> (f64, f64, f64) {
    let mut r = reduced_residual(s, theta, u);
    for _ in 0..NEWTON_MAX_ITERS {
        if r.norm() <= target {
            break;
        }
        let e2 = C64::from_polar(1.0, -2.0 * theta);
        let e4 = C64::from_polar(1.0, 4.0 * theta);
        let js = e2;
        let jt = C64::i() * (-2.0 * s * e2 + 4.0 * e4);
        let det = js.re * jt.im - jt.re * js.im;
        if det.abs() < 1e-300 {
            break;
        }
        let ds = (-r.re * jt.im + jt.re * r.im) / det;
        let dt = (-js.re * r.im + r.re * js.im) / det;

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (s1, t1) = (s + step * ds, theta + step * dt);
            let r1 = reduced_residual(s1, t1, u);
            if r1.norm() < r.norm() {
                s = s1;
                theta = t1;
                r = r1;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (s, theta, r.norm())
}

/// Recovers the unique block lambda-set with velocity `c`, or reports that
/// `c` is forbidden.
pub fn solve_velocity_inverse(c: Velocity, energy: f64) -> Result<InverseVelocity> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::Domain(format!(
            "energy must be positive, got {energy}"
        )));
    }
    if !c.0.is_finite() {
        return Err(Error::Domain(format!("velocity must be finite, got {c}")));
    }
    if forbidden_region_contains(c, energy) {
        return Ok(InverseVelocity::Forbidden {
            bound: forbidden_bound(c, energy),
        });
    }

    let u = c.0 / (6.0 * energy);
    let target = NEWTON_TARGET * u.norm().max(1.0);
    let mut best = f64::INFINITY;
    for k in 0..NEWTON_STARTS {
        let theta0 = PI * k as f64 / NEWTON_STARTS as f64;
        // least-squares s for this theta, kept on the admissible side
        let s0 = ((u - C64::from_polar(1.0, 4.0 * theta0)) * C64::from_polar(1.0, 2.0 * theta0))
            .re
            .max(2.5);
        let (mut s, mut theta, res) = newton_from(s0, theta0, u, target);
        best = best.min(res);
        if res > target || !s.is_finite() || !theta.is_finite() {
            continue;
        }
        // (s, theta) and (-s, theta + pi/2) describe the same velocity
        if s < 0.0 {
            s = -s;
            theta += PI / 2.0;
        }
        if s <= 2.0 {
            continue;
        }
        let rho = ((s + (s * s - 4.0).sqrt()) / 2.0).sqrt();
        if (rho - 1.0).abs() < LAMBDA_TOL {
            return Ok(InverseVelocity::Forbidden {
                bound: forbidden_bound(c, energy),
            });
        }
        let lambda = C64::from_polar(rho, theta.rem_euclid(PI));
        let check = velocity(lambda, energy)?;
        if (check.0 - c.0).norm() <= 1e-9 * c.0.norm().max(energy) {
            return Ok(InverseVelocity::Solved(LambdaSet::from_seed(lambda)));
        }
    }
    Err(Error::NoConvergence { residual: best })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn velocity_known_values() {
        let v = velocity(c(2f64.sqrt(), 0.0), 1.0).unwrap();
        assert!((v.0 - c(21.0, 0.0)).norm() < 1e-12);
        let v = velocity(c(0.0, 2.0), 1.0).unwrap();
        assert!((v.0 - c(-19.5, 0.0)).norm() < 1e-12);
        assert!(velocity(c(0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn velocity_symmetries() {
        let s2 = 2f64.sqrt();
        for l in [c(-s2, 0.0), c(1.0 / s2, 0.0)] {
            assert!((velocity(l, 1.0).unwrap().0 - c(21.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn region_examples() {
        assert!(forbidden_region_contains(Velocity::new(18.0, 0.0), 1.0));
        assert!(!forbidden_region_contains(Velocity::new(21.0, 0.0), 1.0));
        assert!(forbidden_region_contains(Velocity::new(0.0, 6.0), 1.0));
        assert!(forbidden_region_contains(Velocity::new(0.0, 0.0), 1.0));
        assert!(forbidden_region_contains(Velocity::new(1.8, 0.0), 0.1));
        // minimum radius 6 sits at phi = pi/3, pi, 5pi/3
        assert!(forbidden_region_contains(Velocity::new(-6.0, 0.0), 1.0));
        assert!(!forbidden_region_contains(Velocity::new(-6.001, 0.0), 1.0));
    }

    #[test]
    fn radius_extremes() {
        assert!((forbidden_radius(0.0) - 18.0).abs() < 1e-12);
        assert!((forbidden_radius(2.0 * PI / 3.0) - 18.0).abs() < 1e-9);
        assert!((forbidden_radius(PI) - 6.0).abs() < 1e-9);
        assert!((forbidden_radius(PI / 3.0) - 6.0).abs() < 1e-9);
        assert!((forbidden_radius(-0.3) - forbidden_radius(0.3)).abs() < 1e-12);
    }

    #[test]
    fn radius_agrees_with_polynomial() {
        for k in 0..360 {
            let phi = k as f64 * PI / 180.0 + 0.001;
            let r = forbidden_radius(phi);
            let inside = Velocity(C64::from_polar(r * (1.0 - 1e-7), phi));
            let outside = Velocity(C64::from_polar(r * (1.0 + 1e-7), phi));
            assert!(forbidden_region_contains(inside, 1.0), "phi={phi}");
            assert!(!forbidden_region_contains(outside, 1.0), "phi={phi}");
        }
    }

    #[test]
    fn inverse_examples() {
        match solve_velocity_inverse(Velocity::new(21.0, 0.0), 1.0).unwrap() {
            InverseVelocity::Solved(set) => assert!(set.contains(c(2f64.sqrt(), 0.0), 1e-9)),
            other => panic!("{other:?}"),
        }
        match solve_velocity_inverse(Velocity::new(18.0, 0.0), 1.0).unwrap() {
            InverseVelocity::Forbidden { bound } => assert!((bound - 18.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        match solve_velocity_inverse(Velocity::new(42.0, 0.0), 2.0).unwrap() {
            InverseVelocity::Solved(set) => assert!(set.contains(c(2f64.sqrt(), 0.0), 1e-9)),
            other => panic!("{other:?}"),
        }
        assert!(solve_velocity_inverse(Velocity::new(21.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn canonical_order() {
        let set = LambdaSet::from_seed(c(0.2, 0.5));
        assert!(set.0[0].norm() > 1.0 && set.0[1].norm() > 1.0);
        assert!(set.0[0].arg() < set.0[1].arg());
        assert!(set.0[2].norm() < 1.0 && set.0[2].arg() < set.0[3].arg());
        assert!(set.distance(&LambdaSet::from_seed(-1.0 / c(0.2, 0.5).conj())) < 1e-15);
    }

    #[test]
    fn velocity_serializes_as_pair() {
        let v = Velocity::new(21.0, -0.5);
        assert_eq!(serde_json::to_string(&v).unwrap(), "[21.0,-0.5]");
    }
}
