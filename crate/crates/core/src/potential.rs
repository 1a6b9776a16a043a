//! Evaluation of the potentials `v = -4 d_z d_zbar ln det A` and
//! `w = 12 d_z^2 ln det A`.
//!
//! Only the diagonal of `A` depends on `(z, zbar, t)`, and it does so
//! linearly, so `dA/dz`, `dA/dzbar` and `dA/dt` are constant diagonal
//! matrices and the trace calculus in [`crate::derivative`] is exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::derivative::{DerivativeIndex, Direction, TraceContext};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Lu, LuError, C64, NEAR_SINGULAR_RCOND};
use crate::params::{validate, ParameterSet};
use crate::velocity::{velocity, Velocity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub x1: f64,
    pub x2: f64,
    pub t: f64,
}

impl SpacetimePoint {
    pub fn new(x1: f64, x2: f64, t: f64) -> Self {
        Self { x1, x2, t }
    }

    pub fn from_z(z: C64, t: f64) -> Self {
        Self::new(z.re, z.im, t)
    }

    pub fn z(&self) -> C64 {
        C64::new(self.x1, self.x2)
    }

    pub fn zbar(&self) -> C64 {
        C64::new(self.x1, -self.x2)
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.t.is_finite()
    }

    /// The point moved by `dz` in space and `dt` in time.
    pub fn shifted(&self, dz: C64, dt: f64) -> Self {
        Self::new(self.x1 + dz.re, self.x2 + dz.im, self.t + dt)
    }
}

impl fmt::Display for SpacetimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x1={}, x2={}, t={})", self.x1, self.x2, self.t)
    }
}

/// `v`, `w` at one point plus diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub v: f64,
    /// Imaginary part of the computed `-4 F_{z zbar}`; zero up to rounding
    /// for valid parameter sets.
    pub v_imag: f64,
    pub w: C64,
    pub abs_det: f64,
    /// 1-norm condition number estimate of `A`.
    pub cond_estimate: f64,
}

impl FieldSample {
    /// `|Im v| <= 1e-9 (1 + |v|)`.
    pub fn is_real(&self) -> bool {
        self.v_imag.abs() <= 1e-9 * (1.0 + self.v.abs())
    }
}

/// `nu_k`, `omega_k` at one point of a block's own frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub nu: f64,
    pub nu_imag: f64,
    pub omega: C64,
}

/// Derivatives of `ln det A` at a single point, sharing one factorization.
#[derive(Debug, Clone)]
pub struct LocalJet {
    point: SpacetimePoint,
    ctx: TraceContext,
    abs_det: f64,
    rcond: f64,
}

impl LocalJet {
    pub fn point(&self) -> SpacetimePoint {
        self.point
    }

    pub fn abs_det(&self) -> f64 {
        self.abs_det
    }

    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    pub fn derivative(&self, idx: &DerivativeIndex) -> C64 {
        self.ctx.derivative(idx)
    }

    /// Shorthand for [`Self::derivative`] on a literal direction list.
    ///
    /// Panics if `dirs` is empty or longer than five.
    pub fn d(&self, dirs: &[Direction]) -> C64 {
        let idx = DerivativeIndex::new(dirs.to_vec()).expect("derivative order 1..=5");
        self.ctx.derivative(&idx)
    }

    pub fn fields(&self) -> FieldSample {
        use Direction::*;
        let g = -4.0 * self.d(&[Z, ZBar]);
        let w = 12.0 * self.d(&[Z, Z]);
        FieldSample {
            v: g.re,
            v_imag: g.im,
            w,
            abs_det: self.abs_det,
            cond_estimate: 1.0 / self.rcond,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PotentialEvaluator {
    params: ParameterSet,
    off_diagonal: CMatrix,
    d_z: Vec<C64>,
    d_zbar: Vec<C64>,
    d_t: Vec<C64>,
}

impl PotentialEvaluator {
    pub fn new(params: ParameterSet) -> Result<Self> {
        let report = validate(&params);
        if !report.is_ok() {
            return Err(Error::InvalidParameters(report));
        }
        Ok(Self::new_unchecked(params))
    }

    /// Skips validation. Useful for probing what breaks off the constraint
    /// manifold; the lambdas must still be nonzero and pairwise distinct.
    pub fn new_unchecked(params: ParameterSet) -> Self {
        let lambdas = params.lambdas();
        let n = lambdas.len();
        let sqrt_e = params.sqrt_energy();
        let e32 = params.energy() * sqrt_e;
        let i = C64::i();

        let off_diagonal = CMatrix::from_fn(n, |l, m| {
            if l == m {
                C64::new(0.0, 0.0)
            } else {
                1.0 / (lambdas[l] - lambdas[m])
            }
        });
        let d_z = lambdas
            .iter()
            .map(|l| -i * sqrt_e / (2.0 * l * l))
            .collect();
        let d_zbar = vec![i * sqrt_e / 2.0; n];
        let d_t = lambdas
            .iter()
            .map(|l| {
                let l2 = l * l;
                -3.0 * i * e32 * (l2 - 1.0 / (l2 * l2))
            })
            .collect();
        Self {
            params,
            off_diagonal,
            d_z,
            d_zbar,
            d_t,
        }
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    /// Diagonal of `dA/d(direction)`.
    pub fn direction_diagonal(&self, d: Direction) -> &[C64] {
        match d {
            Direction::Z => &self.d_z,
            Direction::ZBar => &self.d_zbar,
            Direction::T => &self.d_t,
        }
    }

    /// Diagonal entries `A_ll` at `p`.
    pub fn diagonal_at(&self, p: &SpacetimePoint) -> Vec<C64> {
        let (z, zbar, t) = (p.z(), p.zbar(), p.t);
        self.params
            .gammas()
            .iter()
            .enumerate()
            .map(|(l, gamma)| self.d_zbar[l] * zbar + self.d_z[l] * z + self.d_t[l] * t - gamma)
            .collect()
    }

    pub fn build_matrix(&self, p: &SpacetimePoint) -> CMatrix {
        let mut a = self.off_diagonal.clone();
        for (l, d) in self.diagonal_at(p).into_iter().enumerate() {
            a[(l, l)] = d;
        }
        a
    }

    fn factor(&self, p: &SpacetimePoint) -> Result<(Lu, CMatrix, f64)> {
        let a = self.build_matrix(p);
        let lu = Lu::factor(&a).map_err(|e| match e {
            LuError::Singular { pivot } => Error::Singular { point: *p, pivot },
            other => Error::InvalidInput(other.to_string()),
        })?;
        let inverse = lu.inverse();
        let rcond = lu.rcond_with_inverse(&inverse);
        if rcond < NEAR_SINGULAR_RCOND {
            return Err(Error::NearSingular {
                point: *p,
                abs_det: lu.abs_det(),
                rcond,
            });
        }
        Ok((lu, inverse, rcond))
    }

    /// Factors `A(p)` once; derivatives of any order can then be read off.
    pub fn local(&self, p: &SpacetimePoint) -> Result<LocalJet> {
        let (lu, inverse, rcond) = self.factor(p)?;
        Ok(LocalJet {
            point: *p,
            ctx: TraceContext::new(&inverse, [&self.d_z, &self.d_zbar, &self.d_t]),
            abs_det: lu.abs_det(),
            rcond,
        })
    }

    pub fn log_det_derivative(&self, p: &SpacetimePoint, idx: &DerivativeIndex) -> Result<C64> {
        Ok(self.local(p)?.derivative(idx))
    }

    /// Fields via the trace calculus (the default path).
    pub fn eval_fields(&self, p: &SpacetimePoint) -> Result<FieldSample> {
        Ok(self.local(p)?.fields())
    }

    /// Fields via the linear systems `A psi = -2i sqrt(E) e_j` and their
    /// z-derivatives, summing the diagonal components.
    pub fn eval_fields_linear_system(&self, p: &SpacetimePoint) -> Result<FieldSample> {
        let (lu, _, rcond) = self.factor(p)?;
        let n = self.dim();
        let sqrt_e = self.params.sqrt_energy();
        let i = C64::i();
        let lambdas = self.params.lambdas();
        // A (psi)_z = -D_z psi
        let minus_dz: Vec<C64> = self.d_z.iter().map(|d| -d).collect();
        debug_assert!(lambdas
            .iter()
            .zip(&minus_dz)
            .all(|(l, d)| (d - i * sqrt_e / (2.0 * l * l)).norm() <= 1e-14 * d.norm()));

        let mut v = C64::new(0.0, 0.0);
        let mut w = C64::new(0.0, 0.0);
        let mut rhs = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            for (scale, acc) in [
                (-2.0 * i * sqrt_e, &mut v),
                (-6.0 * i * sqrt_e / (lambdas[j] * lambdas[j]), &mut w),
            ] {
                rhs.iter_mut().for_each(|r| *r = C64::new(0.0, 0.0));
                rhs[j] = scale;
                let psi = lu
                    .solve(&rhs)
                    .map_err(|e| Error::InvalidInput(e.to_string()))?;
                let drhs: Vec<C64> = psi.iter().zip(&minus_dz).map(|(a, b)| a * b).collect();
                let dpsi = lu
                    .solve(&drhs)
                    .map_err(|e| Error::InvalidInput(e.to_string()))?;
                *acc += dpsi[j];
            }
        }
        Ok(FieldSample {
            v: v.re,
            v_imag: v.im,
            w,
            abs_det: lu.abs_det(),
            cond_estimate: 1.0 / rcond,
        })
    }

    /// Velocity of block `k` (1-based), computed from `lambda_{4k}`.
    pub fn block_velocity(&self, k: usize) -> Result<Velocity> {
        if k == 0 || k > self.params.blocks() {
            return Err(Error::InvalidInput(format!(
                "block index {k} out of range 1..={}",
                self.params.blocks()
            )));
        }
        velocity(self.params.lambdas()[4 * k - 1], self.params.energy())
    }

    pub fn block_velocities(&self) -> Result<Vec<Velocity>> {
        (1..=self.params.blocks())
            .map(|k| self.block_velocity(k))
            .collect()
    }

    /// Evaluator for the 4x4 diagonal block `A^(k)` alone.
    pub fn block(&self, k: usize) -> Result<PotentialEvaluator> {
        Ok(Self::new_unchecked(self.params.block(k)?))
    }

    /// `(nu_k, omega_k)` at `xi`, evaluated in the block frame at time `t`.
    pub fn soliton_profile_at(&self, k: usize, xi: C64, t: f64) -> Result<ProfileSample> {
        let c = self.block_velocity(k)?;
        let block = self.block(k)?;
        let f = block.eval_fields(&SpacetimePoint::from_z(xi + c.0 * t, t))?;
        Ok(ProfileSample {
            nu: f.v,
            nu_imag: f.v_imag,
            omega: f.w,
        })
    }

    pub fn soliton_profile(&self, k: usize, xi: C64) -> Result<ProfileSample> {
        self.soliton_profile_at(k, xi, 0.0)
    }
}
