//! Parameter sets for the rational potentials.
//!
//! A parameter set consists of an energy `E > 0` and `4N` pairs
//! `(lambda_j, gamma_j)`. Only one `(lambda, gamma)` pair per block of four
//! is free; [`expand_blocks`] derives the rest.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Minimum distance of `|lambda|` from 0 and from 1.
pub const LAMBDA_TOL: f64 = 1e-6;
/// Minimum separation between two lambdas of the same set.
pub const COLLISION_TOL: f64 = 1e-6;
/// Relative tolerance for the algebraic ties between lambdas and gammas.
pub const RELATION_TOL: f64 = 1e-10;

/// The free parameters of one block: `lambda_{4k-3}` and `gamma_{4k-3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockSeed {
    pub lambda: C64,
    pub gamma: C64,
}

impl BlockSeed {
    pub fn new(lambda: C64, gamma: C64) -> Self {
        Self { lambda, gamma }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    energy: f64,
    lambdas: Vec<C64>,
    gammas: Vec<C64>,
}

impl ParameterSet {
    /// Builds a set from full arrays without checking any constraint.
    /// Use [`validate`] to inspect it.
    pub fn from_arrays_unchecked(energy: f64, lambdas: Vec<C64>, gammas: Vec<C64>) -> Self {
        Self {
            energy,
            lambdas,
            gammas,
        }
    }

    /// Expands seeds into full arrays without checking any constraint.
    pub fn expand_unchecked(energy: f64, seeds: &[BlockSeed]) -> Self {
        let mut lambdas = Vec::with_capacity(4 * seeds.len());
        let mut gammas = Vec::with_capacity(4 * seeds.len());
        for seed in seeds {
            let (l, g) = block_quad(seed);
            lambdas.extend_from_slice(&l);
            gammas.extend_from_slice(&g);
        }
        Self {
            energy,
            lambdas,
            gammas,
        }
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn sqrt_energy(&self) -> f64 {
        self.energy.sqrt()
    }

    /// Number of blocks `N`.
    pub fn blocks(&self) -> usize {
        self.lambdas.len() / 4
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[C64] {
        &self.lambdas
    }

    pub fn gammas(&self) -> &[C64] {
        &self.gammas
    }

    pub fn gammas_mut(&mut self) -> &mut [C64] {
        &mut self.gammas
    }

    pub fn lambdas_mut(&mut self) -> &mut [C64] {
        &mut self.lambdas
    }

    /// The seed of block `k` (1-based), read back from the full arrays.
    pub fn seed(&self, k: usize) -> BlockSeed {
        let i = 4 * (k - 1);
        BlockSeed::new(self.lambdas[i], self.gammas[i])
    }

    pub fn seeds(&self) -> Vec<BlockSeed> {
        (1..=self.blocks()).map(|k| self.seed(k)).collect()
    }

    /// The N = 1 parameter set formed by block `k` (1-based) alone.
    pub fn block(&self, k: usize) -> Result<ParameterSet> {
        if k == 0 || k > self.blocks() {
            return Err(Error::InvalidInput(format!(
                "block index {k} out of range 1..={}",
                self.blocks()
            )));
        }
        let r = 4 * (k - 1)..4 * k;
        Ok(Self {
            energy: self.energy,
            lambdas: self.lambdas[r.clone()].to_vec(),
            gammas: self.gammas[r].to_vec(),
        })
    }
}

fn block_quad(seed: &BlockSeed) -> ([C64; 4], [C64; 4]) {
    let l = seed.lambda;
    let g = seed.gamma;
    let l3 = 1.0 / l.conj();
    let g3 = l.conj() * l.conj() * g.conj();
    ([l, -l, l3, -l3], [g, g - 1.0 / l, g3, g3 - 1.0 / l3])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    NonPositiveEnergy { energy: f64 },
    BadLength { len: usize },
    NonFinite { index: usize },
    LambdaNearZero { index: usize, modulus: f64 },
    LambdaOnUnitCircle { index: usize, modulus: f64 },
    LambdaCollision { first: usize, second: usize },
    PairLambda { index: usize },
    PairGamma { index: usize },
    ConjugateLambda { index: usize },
    ConjugateGamma { index: usize },
}

// Indices are stored 0-based and printed 1-based.
impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonPositiveEnergy { energy } => write!(f, "E > 0 violated (E = {energy})"),
            Violation::BadLength { len } => {
                write!(f, "arrays must have length 4N with N >= 1 (got {len})")
            }
            Violation::NonFinite { index } => {
                write!(f, "λ_{0}, γ_{0} must be finite", index + 1)
            }
            Violation::LambdaNearZero { index, modulus } => {
                write!(
                    f,
                    "λ_{} ≠ 0 violated (|λ_{}| = {modulus:e})",
                    index + 1,
                    index + 1
                )
            }
            Violation::LambdaOnUnitCircle { index, modulus } => write!(
                f,
                "|λ_j| ≠ 1 violated for j = {} (|λ_{}| = {modulus})",
                index + 1,
                index + 1
            ),
            Violation::LambdaCollision { first, second } => write!(
                f,
                "λ_l ≠ λ_m violated for l = {}, m = {}",
                first + 1,
                second + 1
            ),
            Violation::PairLambda { index } => {
                write!(f, "λ_{} = −λ_{} violated", index + 2, index + 1)
            }
            Violation::PairGamma { index } => write!(
                f,
                "γ_{} − γ_{} = 1/λ_{} violated",
                index + 1,
                index + 2,
                index + 1
            ),
            Violation::ConjugateLambda { index } => {
                write!(f, "λ_{} = 1/conj(λ_{}) violated", index + 3, index + 1)
            }
            Violation::ConjugateGamma { index } => write!(
                f,
                "γ_{} = conj(λ_{})²·conj(γ_{}) violated",
                index + 3,
                index + 1,
                index + 1
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {v}")?;
        }
        Ok(())
    }
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= RELATION_TOL * (1.0 + b.norm())
}

/// Checks every constraint on a parameter set and reports each failure.
pub fn validate(p: &ParameterSet) -> ValidationReport {
    let mut violations = Vec::new();
    if !(p.energy > 0.0 && p.energy.is_finite()) {
        violations.push(Violation::NonPositiveEnergy { energy: p.energy });
    }
    let n = p.lambdas.len();
    if n == 0 || !n.is_multiple_of(4) || p.gammas.len() != n {
        violations.push(Violation::BadLength {
            len: n.max(p.gammas.len()),
        });
        return ValidationReport { violations };
    }

    let mut finite = true;
    for (j, (l, g)) in p.lambdas.iter().zip(&p.gammas).enumerate() {
        if !(l.is_finite() && g.is_finite()) {
            violations.push(Violation::NonFinite { index: j });
            finite = false;
        }
    }
    if !finite {
        return ValidationReport { violations };
    }

    for (j, l) in p.lambdas.iter().enumerate() {
        let m = l.norm();
        if m < LAMBDA_TOL {
            violations.push(Violation::LambdaNearZero {
                index: j,
                modulus: m,
            });
        } else if (m - 1.0).abs() < LAMBDA_TOL {
            violations.push(Violation::LambdaOnUnitCircle {
                index: j,
                modulus: m,
            });
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if (p.lambdas[a] - p.lambdas[b]).norm() < COLLISION_TOL {
                violations.push(Violation::LambdaCollision {
                    first: a,
                    second: b,
                });
            }
        }
    }
    if violations
        .iter()
        .any(|v| matches!(v, Violation::LambdaNearZero { .. }))
    {
        return ValidationReport { violations };
    }

    for j in (0..n).step_by(2) {
        let (l1, l2) = (p.lambdas[j], p.lambdas[j + 1]);
        if !close(l2, -l1) {
            violations.push(Violation::PairLambda { index: j });
        }
        if !close(p.gammas[j] - p.gammas[j + 1], 1.0 / l1) {
            violations.push(Violation::PairGamma { index: j });
        }
    }
    for j in (0..n).step_by(4) {
        let l1 = p.lambdas[j];
        if !close(p.lambdas[j + 2], 1.0 / l1.conj()) {
            violations.push(Violation::ConjugateLambda { index: j });
        }
        if !close(p.gammas[j + 2], l1.conj() * l1.conj() * p.gammas[j].conj()) {
            violations.push(Violation::ConjugateGamma { index: j });
        }
    }
    ValidationReport { violations }
}

/// Expands one seed per block into a full, validated parameter set.
pub fn expand_blocks(energy: f64, seeds: &[BlockSeed]) -> Result<ParameterSet> {
    if seeds.is_empty() {
        return Err(Error::InvalidInput(
            "at least one block seed is required".into(),
        ));
    }
    let p = ParameterSet::expand_unchecked(energy, seeds);
    let report = validate(&p);
    if report.is_ok() {
        Ok(p)
    } else {
        Err(Error::InvalidParameters(report))
    }
}

/// Replaces every `gamma_j` by `gamma_j - delta_j` so that the potential of
/// the result at `(z, t)` equals the potential of `p` at `(z + zeta, t + tau)`.
///
/// `delta_j` is the change of the diagonal entry `A_jj` under that shift.
pub fn translate_gammas(p: &ParameterSet, zeta: C64, tau: f64) -> ParameterSet {
    let sqrt_e = p.sqrt_energy();
    let e32 = p.energy * sqrt_e;
    let i = C64::i();
    let mut out = p.clone();
    for (g, l) in out.gammas.iter_mut().zip(&p.lambdas) {
        let l2 = l * l;
        let delta = i * sqrt_e / 2.0 * (zeta.conj() - zeta / l2)
            - 3.0 * i * e32 * tau * (l2 - 1.0 / (l2 * l2));
        *g -= delta;
    }
    out
}
