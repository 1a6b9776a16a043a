//! Numerical witnesses: the Novikov-Veselov residual, travel-wave
//! exactness, translation covariance and the large-time splitting into
//! single-block solitons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::derivative::Direction::{self, ZBar, T, Z};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::params::{translate_gammas, ParameterSet};
use crate::potential::{LocalJet, PotentialEvaluator, SpacetimePoint};
use crate::velocity::Velocity;

/// Uniform random points with `|x| <= radius` and `|t| <= time_span`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub points: usize,
    pub seed: u64,
    pub radius: f64,
    pub time_span: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            points: 100,
            seed: 0,
            radius: 5.0,
            time_span: 2.0,
        }
    }
}

impl SampleSpec {
    pub fn new(points: usize, seed: u64) -> Self {
        Self {
            points,
            seed,
            ..Self::default()
        }
    }

    pub fn points(&self) -> Vec<SpacetimePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.points);
        while out.len() < self.points {
            let x1 = rng.random_range(-self.radius..=self.radius);
            let x2 = rng.random_range(-self.radius..=self.radius);
            let t = if self.time_span > 0.0 {
                rng.random_range(-self.time_span..=self.time_span)
            } else {
                0.0
            };
            if x1 * x1 + x2 * x2 <= self.radius * self.radius {
                out.push(SpacetimePoint::new(x1, x2, t));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointResidual {
    /// `|d_t v - 4 Re(4 d_z^3 v + d_z(v w) - E d_z w)|`
    pub evolution: f64,
    /// `|d_zbar w + 3 d_z v|`
    pub constraint: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub evolution_residual: f64,
    pub constraint_residual: f64,
    pub max_imag_v: f64,
    pub sample: SampleSpec,
}

/// Wirtinger z-derivative of `Re g` given `g_z..z` and `g_zbar..zbar`:
/// `d_z^n Re g = (d_z^n g + conj(d_zbar^n g)) / 2`.
fn re_dz(dz: C64, dzbar: C64) -> C64 {
    (dz + dzbar.conj()) / 2.0
}

/// Both Novikov-Veselov residuals at one point, from exact derivatives.
///
/// `v = Re g` with `g = -4 F_{z zbar}`, `w = 12 F_{zz}`.
pub fn nv_residual_at(jet: &LocalJet, energy: f64) -> PointResidual {
    let f = |d: &[Direction]| jet.d(d);
    let g = -4.0 * f(&[Z, ZBar]);
    let v = g.re;
    let w = 12.0 * f(&[Z, Z]);

    let v_t = (-4.0 * f(&[T, Z, ZBar])).re;
    let v_z = re_dz(-4.0 * f(&[Z, Z, ZBar]), -4.0 * f(&[Z, ZBar, ZBar]));
    let v_zzz = re_dz(
        -4.0 * f(&[Z, Z, Z, Z, ZBar]),
        -4.0 * f(&[Z, ZBar, ZBar, ZBar, ZBar]),
    );
    let w_z = 12.0 * f(&[Z, Z, Z]);
    let w_zbar = 12.0 * f(&[Z, Z, ZBar]);

    let rhs = 4.0 * (4.0 * v_zzz + v_z * w + v * w_z - energy * w_z).re;
    PointResidual {
        evolution: (v_t - rhs).abs(),
        constraint: (w_zbar + 3.0 * v_z).norm(),
    }
}

pub fn nv_residual(ev: &PotentialEvaluator, sample: &SampleSpec) -> Result<ResidualReport> {
    let mut report = ResidualReport {
        evolution_residual: 0.0,
        constraint_residual: 0.0,
        max_imag_v: 0.0,
        sample: *sample,
    };
    let energy = ev.params().energy();
    for p in sample.points() {
        let jet = ev.local(&p)?;
        let r = nv_residual_at(&jet, energy);
        report.evolution_residual = report.evolution_residual.max(r.evolution);
        report.constraint_residual = report.constraint_residual.max(r.constraint);
        report.max_imag_v = report.max_imag_v.max(jet.fields().v_imag.abs());
    }
    Ok(report)
}

const D1: [(i32, f64); 4] = [
    (-2, 1.0 / 12.0),
    (-1, -8.0 / 12.0),
    (1, 8.0 / 12.0),
    (2, -1.0 / 12.0),
];
const D2: [(i32, f64); 5] = [
    (-2, -1.0 / 12.0),
    (-1, 16.0 / 12.0),
    (0, -30.0 / 12.0),
    (1, 16.0 / 12.0),
    (2, -1.0 / 12.0),
];
const D3: [(i32, f64); 6] = [
    (-3, 1.0 / 8.0),
    (-2, -1.0),
    (-1, 13.0 / 8.0),
    (1, -13.0 / 8.0),
    (2, 1.0),
    (3, -1.0 / 8.0),
];

/// Nested fourth-order central difference of `f` in `(x1, x2, t)`.
fn stencil(
    f: &mut impl FnMut(SpacetimePoint) -> Result<(f64, C64)>,
    p: SpacetimePoint,
    h: [f64; 3],
    axes: &[(usize, &[(i32, f64)])],
) -> Result<(f64, C64)> {
    let Some(((axis, weights), rest)) = axes.split_first() else {
        return f(p);
    };
    let order = match weights.len() {
        4 => 1,
        5 => 2,
        _ => 3,
    };
    let mut acc = (0.0, C64::new(0.0, 0.0));
    for &(k, wgt) in weights.iter() {
        let off = k as f64 * h[*axis];
        let q = match axis {
            0 => SpacetimePoint::new(p.x1 + off, p.x2, p.t),
            1 => SpacetimePoint::new(p.x1, p.x2 + off, p.t),
            _ => SpacetimePoint::new(p.x1, p.x2, p.t + off),
        };
        let (a, b) = stencil(f, q, h, rest)?;
        acc.0 += wgt * a;
        acc.1 += wgt * b;
    }
    let scale = h[*axis].powi(order);
    Ok((acc.0 / scale, acc.1 / scale))
}

/// The same residuals with every derivative of `v` and `w` replaced by
/// fourth-order central differences of step `h` in `x1`, `x2` and
/// `h / max(1, |c|)` in `t`, `|c|` the largest block speed.
pub fn nv_residual_fd(
    ev: &PotentialEvaluator,
    sample: &SampleSpec,
    h: f64,
) -> Result<ResidualReport> {
    let energy = ev.params().energy();
    let speed = ev
        .block_velocities()?
        .iter()
        .map(|c| c.0.norm())
        .fold(1.0, f64::max);
    let h = [h, h, h / speed];
    let mut fields = |q: SpacetimePoint| ev.eval_fields(&q).map(|s| (s.v, s.w));
    let mut report = ResidualReport {
        evolution_residual: 0.0,
        constraint_residual: 0.0,
        max_imag_v: 0.0,
        sample: *sample,
    };
    let i = C64::i();
    for p in sample.points() {
        let (v, w) = fields(p)?;
        let (v1, w1) = stencil(&mut fields, p, h, &[(0, &D1)])?;
        let (v2, w2) = stencil(&mut fields, p, h, &[(1, &D1)])?;
        let (vt, _) = stencil(&mut fields, p, h, &[(2, &D1)])?;
        let (v111, _) = stencil(&mut fields, p, h, &[(0, &D3)])?;
        let (v222, _) = stencil(&mut fields, p, h, &[(1, &D3)])?;
        let (v112, _) = stencil(&mut fields, p, h, &[(0, &D2), (1, &D1)])?;
        let (v122, _) = stencil(&mut fields, p, h, &[(1, &D2), (0, &D1)])?;

        // d_z = (d_1 - i d_2)/2, d_zbar = (d_1 + i d_2)/2
        let v_z = C64::new(v1, -v2) / 2.0;
        let w_z = (w1 - i * w2) / 2.0;
        let w_zbar = (w1 + i * w2) / 2.0;
        let v_zzz = C64::new(v111 - 3.0 * v122, -3.0 * v112 + v222) / 8.0;

        let rhs = 4.0 * (4.0 * v_zzz + v_z * w + v * w_z - energy * w_z).re;
        report.evolution_residual = report.evolution_residual.max((vt - rhs).abs());
        report.constraint_residual = report.constraint_residual.max((w_zbar + 3.0 * v_z).norm());
    }
    Ok(report)
}

/// `max |v(z + c dt, t + dt) - v(z, t)|` over `points`.
pub fn travel_wave_error_with(
    ev: &PotentialEvaluator,
    c: Velocity,
    dt: f64,
    points: &[SpacetimePoint],
) -> Result<f64> {
    if dt == 0.0 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for p in points {
        let a = ev.eval_fields(p)?.v;
        let b = ev.eval_fields(&p.shifted(c.0 * dt, dt))?.v;
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}

/// Travel-wave error using the velocity of the first block.
pub fn travel_wave_error(
    ev: &PotentialEvaluator,
    dt: f64,
    points: &[SpacetimePoint],
) -> Result<f64> {
    travel_wave_error_with(ev, ev.block_velocity(1)?, dt, points)
}

/// Largest discrepancy between the fields of `translate_gammas(p, zeta, tau)`
/// at `q` and the fields of `p` at `q + (zeta, tau)`, relative to
/// `max(|field|, 1)`.
pub fn translation_covariance_error(
    p: &ParameterSet,
    zeta: C64,
    tau: f64,
    points: &[SpacetimePoint],
) -> Result<f64> {
    let original = PotentialEvaluator::new(p.clone())?;
    let moved = PotentialEvaluator::new(translate_gammas(p, zeta, tau))?;
    let mut worst: f64 = 0.0;
    for q in points {
        let a = moved.eval_fields(q)?;
        let b = original.eval_fields(&q.shifted(zeta, tau))?;
        worst = worst
            .max((a.v - b.v).abs() / b.v.abs().max(1.0))
            .max((a.w - b.w).norm() / b.w.norm().max(1.0));
    }
    Ok(worst)
}

/// Square lattice of `per_axis`² points clipped to `|xi| <= radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiWindow {
    pub radius: f64,
    pub per_axis: usize,
}

impl Default for XiWindow {
    fn default() -> Self {
        Self {
            radius: 3.0,
            per_axis: 25,
        }
    }
}

impl XiWindow {
    pub fn with_radius(radius: f64) -> Self {
        Self {
            radius,
            ..Self::default()
        }
    }

    pub fn points(&self) -> Vec<C64> {
        let n = self.per_axis.max(2);
        let step = 2.0 * self.radius / (n - 1) as f64;
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let xi = C64::new(
                    -self.radius + a as f64 * step,
                    -self.radius + b as f64 * step,
                );
                if xi.norm() <= self.radius * (1.0 + 1e-12) {
                    out.push(xi);
                }
            }
        }
        out
    }
}

/// Errors for one sign of time. `times` holds magnitudes; the evaluation
/// time is `sign * times[i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub sign: i8,
    pub times: Vec<f64>,
    pub errors_v: Vec<f64>,
    pub errors_w: Vec<f64>,
    pub probe_decay: Vec<f64>,
}

impl SweepTable {
    pub fn errors_strictly_decreasing(&self) -> bool {
        strictly_decreasing(&self.errors_v) && strictly_decreasing(&self.errors_w)
    }

    pub fn probe_strictly_decreasing(&self) -> bool {
        strictly_decreasing(&self.probe_decay)
    }
}

pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub block: usize,
    pub velocity: Velocity,
    pub probe_velocity: Velocity,
    pub window: XiWindow,
    pub forward: SweepTable,
    pub backward: SweepTable,
}

/// Compares the full solution in the frame of block `k` with that block's
/// soliton profile, over a window of `xi`, at `±t` for every `t` in `times`.
///
/// Also records `sup |v(xi + probe t, t)|` over the window, which should
/// vanish as `|t|` grows when `probe` differs from every block velocity.
pub fn asymptotic_error_sweep(
    ev: &PotentialEvaluator,
    k: usize,
    times: &[f64],
    window: &XiWindow,
    probe: Velocity,
) -> Result<AsymptoticsReport> {
    if times.is_empty()
        || times[0] <= 0.0
        || !strictly_decreasing(&times.iter().map(|t| -t).collect::<Vec<_>>())
    {
        return Err(Error::InvalidInput(
            "times must be positive and strictly increasing".into(),
        ));
    }
    let velocities = ev.block_velocities()?;
    let c = ev.block_velocity(k)?;
    let scale = velocities.iter().map(|v| v.0.norm()).fold(1.0, f64::max);
    for (a, va) in velocities.iter().enumerate() {
        for vb in &velocities[a + 1..] {
            if (va.0 - vb.0).norm() <= 1e-9 * scale {
                return Err(Error::InvalidInput(format!(
                    "block velocities must be pairwise distinct, {va} repeats"
                )));
            }
        }
        if (va.0 - probe.0).norm() <= 1e-9 * scale {
            return Err(Error::InvalidInput(format!(
                "probe velocity {probe} coincides with block velocity {va}"
            )));
        }
    }

    let xis = window.points();
    let profiles = xis
        .iter()
        .map(|xi| ev.soliton_profile(k, *xi))
        .collect::<Result<Vec<_>>>()?;

    let table = |sign: i8| -> Result<SweepTable> {
        let mut out = SweepTable {
            sign,
            times: times.to_vec(),
            errors_v: Vec::with_capacity(times.len()),
            errors_w: Vec::with_capacity(times.len()),
            probe_decay: Vec::with_capacity(times.len()),
        };
        for &tm in times {
            let t = sign as f64 * tm;
            let (mut ev_err, mut ew_err, mut probe_sup) = (0.0f64, 0.0f64, 0.0f64);
            for (xi, prof) in xis.iter().zip(&profiles) {
                let f = ev.eval_fields(&SpacetimePoint::from_z(xi + c.0 * t, t))?;
                ev_err = ev_err.max((f.v - prof.nu).abs());
                ew_err = ew_err.max((f.w - prof.omega).norm());
                let g = ev.eval_fields(&SpacetimePoint::from_z(xi + probe.0 * t, t))?;
                probe_sup = probe_sup.max(g.v.abs());
            }
            out.errors_v.push(ev_err);
            out.errors_w.push(ew_err);
            out.probe_decay.push(probe_sup);
        }
        Ok(out)
    };

    Ok(AsymptoticsReport {
        block: k,
        velocity: c,
        probe_velocity: probe,
        window: *window,
        forward: table(1)?,
        backward: table(-1)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{expand_blocks, BlockSeed};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn single() -> PotentialEvaluator {
        PotentialEvaluator::new(
            expand_blocks(1.0, &[BlockSeed::new(c(2f64.sqrt(), 0.0), c(1.0, 0.0))]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn sampling_is_deterministic_and_in_range() {
        let spec = SampleSpec::new(50, 7);
        let a = spec.points();
        assert_eq!(a, spec.points());
        assert_eq!(a.len(), 50);
        assert!(a.iter().all(|p| p.z().norm() <= 5.0 && p.t.abs() <= 2.0));
        assert_ne!(a, SampleSpec::new(50, 8).points());
    }

    #[test]
    fn residual_vanishes_for_single_block() {
        let r = nv_residual(&single(), &SampleSpec::new(30, 1)).unwrap();
        assert!(r.evolution_residual <= 1e-8, "{r:?}");
        assert!(r.constraint_residual <= 1e-10, "{r:?}");
    }

    #[test]
    fn residual_detects_perturbed_gamma() {
        let mut p = single().params().clone();
        p.gammas_mut()[1] += c(0.1, 0.0);
        let ev = PotentialEvaluator::new_unchecked(p);
        let r = nv_residual(&ev, &SampleSpec::new(30, 1)).unwrap();
        assert!(r.evolution_residual > 1e-3, "{r:?}");
    }

    #[test]
    fn travel_wave_zero_shift() {
        let pts = SampleSpec::new(5, 2).points();
        assert_eq!(travel_wave_error(&single(), 0.0, &pts).unwrap(), 0.0);
    }

    #[test]
    fn window_is_clipped_disc() {
        let w = XiWindow::with_radius(3.0);
        let pts = w.points();
        assert!(pts.iter().all(|p| p.norm() <= 3.0 + 1e-9));
        assert!(pts.contains(&c(0.0, 0.0)));
        assert!(pts.contains(&c(3.0, 0.0)));
    }

    #[test]
    fn sweep_rejects_bad_times() {
        let ev = single();
        let w = XiWindow::default();
        for times in [vec![], vec![-1.0, 2.0], vec![10.0, 5.0], vec![1.0, 1.0]] {
            assert!(asymptotic_error_sweep(&ev, 1, &times, &w, Velocity::new(0.0, 0.0)).is_err());
        }
        assert!(asymptotic_error_sweep(&ev, 1, &[1.0], &w, Velocity::new(21.0, 0.0)).is_err());
    }

    #[test]
    fn sweep_single_block_is_exact() {
        let r = asymptotic_error_sweep(
            &single(),
            1,
            &[10.0, 100.0],
            &XiWindow {
                radius: 2.0,
                per_axis: 7,
            },
            Velocity::new(0.0, 0.0),
        )
        .unwrap();
        for table in [&r.forward, &r.backward] {
            assert!(table
                .errors_v
                .iter()
                .chain(&table.errors_w)
                .all(|e| *e <= 1e-10));
        }
    }

    #[test]
    fn strictly_decreasing_helper() {
        assert!(strictly_decreasing(&[3.0, 2.0, 1.0]));
        assert!(!strictly_decreasing(&[3.0, 3.0]));
        assert!(strictly_decreasing(&[1.0]));
    }
}
