//! Plumbing behind the `nvgz` binary: argument types, file loading, the
//! exit-code contract and the command implementations.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nvgz::config::ParameterFile;
use nvgz::velocity::within_block_mismatch;
use nvgz::verify::{asymptotic_error_sweep, nv_residual, SampleSpec, XiWindow};
use nvgz::{
    solve_velocity_inverse, validate, Error, InverseVelocity, ParameterSet, PotentialEvaluator,
    SpacetimePoint, Velocity,
};
use serde_json::json;

pub mod exit {
    pub const OK: u8 = 0;
    pub const VALIDATION: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const NO_CONVERGENCE: u8 = 3;
    pub const EVALUATION: u8 = 4;
    pub const INTERNAL: u8 = 5;
}

/// A failed command: message for stderr plus process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameters(_)
            | Error::Domain(_)
            | Error::InvalidInput(_)
            | Error::InvalidIndex(_) => exit::VALIDATION,
            Error::NoConvergence { .. } => exit::NO_CONVERGENCE,
            Error::Singular { .. } | Error::NearSingular { .. } => exit::EVALUATION,
        };
        Failure::new(code, e.to_string())
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

/// `min:max:count` along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }
}

impl FromStr for AxisRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, count] = parts[..] else {
            return Err(format!("expected min:max:count, got {s:?}"));
        };
        let min: f64 = min
            .trim()
            .parse()
            .map_err(|e| format!("bad minimum {min:?}: {e}"))?;
        let max: f64 = max
            .trim()
            .parse()
            .map_err(|e| format!("bad maximum {max:?}: {e}"))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|e| format!("bad count {count:?}: {e}"))?;
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(format!("need finite min < max, got {min}:{max}"));
        }
        if count < 2 {
            return Err(format!("need at least 2 points per axis, got {count}"));
        }
        Ok(Self { min, max, count })
    }
}

/// `x1min:x1max:n1,x2min:x2max:n2` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x1: AxisRange,
    pub x2: AxisRange,
    pub t: f64,
}

impl GridSpec {
    pub fn parse(axes: &str, t: f64) -> Result<Self, String> {
        let (a, b) = axes
            .split_once(',')
            .ok_or_else(|| format!("expected x1min:x1max:n1,x2min:x2max:n2, got {axes:?}"))?;
        if !t.is_finite() {
            return Err(format!("time must be finite, got {t}"));
        }
        Ok(Self {
            x1: a.parse()?,
            x2: b.parse()?,
            t,
        })
    }

    /// Grid points with `x1` the slow index and `x2` the fast one.
    pub fn points(&self) -> impl Iterator<Item = SpacetimePoint> + '_ {
        (0..self.x1.count).flat_map(move |i| {
            (0..self.x2.count)
                .map(move |j| SpacetimePoint::new(self.x1.value(i), self.x2.value(j), self.t))
        })
    }
}

/// Parses `RE,IM`.
pub fn parse_complex(s: &str) -> Result<Velocity, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let re: f64 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad real part {a:?}: {e}"))?;
    let im: f64 = b
        .trim()
        .parse()
        .map_err(|e| format!("bad imaginary part {b:?}: {e}"))?;
    Ok(Velocity::new(re, im))
}

/// Parses a comma-separated list of times.
pub fn parse_times(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad time {t:?}: {e}"))
        })
        .collect()
}

pub fn load_file(path: &Path) -> CmdResult<ParameterFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(exit::PARSE, format!("cannot read {}: {e}", path.display())))?;
    ParameterFile::from_json(&text).map_err(|e| {
        Failure::new(
            exit::PARSE,
            format!(
                "parse error in {} at line {}, column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ),
        )
    })
}

pub fn load_valid(path: &Path) -> CmdResult<ParameterSet> {
    let file = load_file(path)?;
    let p = file.to_parameter_set_unchecked();
    let report = validate(&p);
    if report.is_ok() {
        Ok(p)
    } else {
        Err(Failure::new(
            exit::VALIDATION,
            format!("invalid parameter set:\n{report}"),
        ))
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| {
            Failure::new(
                exit::EVALUATION,
                format!("cannot write {}: {e}", path.display()),
            )
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::new(exit::EVALUATION, format!("cannot write output: {e}")))
        }
    }
}

fn line(json: serde_json::Result<String>) -> String {
    json.expect("plain data serializes") + "\n"
}

pub fn cmd_validate(path: &Path) -> CmdResult<String> {
    let file = load_file(path)?;
    let report = validate(&file.to_parameter_set_unchecked());
    if report.is_ok() {
        Ok("ok\n".into())
    } else {
        Err(Failure::new(
            exit::VALIDATION,
            format!("invalid parameter set:\n{report}"),
        ))
    }
}

pub const CSV_HEADER: &str = "x1,x2,v,w_re,w_im,absdet";

/// One CSV row per grid point, every number with 17 significant digits.
pub fn eval_csv(p: &ParameterSet, grid: &GridSpec) -> CmdResult<String> {
    let ev = PotentialEvaluator::new_unchecked(p.clone());
    let mut out = String::with_capacity(120 * grid.x1.count * grid.x2.count);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for q in grid.points() {
        let f = ev.eval_fields(&q).map_err(|e| {
            Failure::new(
                exit::EVALUATION,
                format!("evaluation failed at grid point {q}: {e}"),
            )
        })?;
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            q.x1, q.x2, f.v, f.w.re, f.w.im, f.abs_det
        ));
    }
    Ok(out)
}

pub fn cmd_eval(path: &Path, grid: &GridSpec, out: Option<&PathBuf>) -> CmdResult {
    let p = load_valid(path)?;
    emit(out, &eval_csv(&p, grid)?)
}

pub fn cmd_velocity(path: &Path) -> CmdResult<String> {
    let p = load_valid(path)?;
    let mismatch = within_block_mismatch(&p)?;
    if mismatch > 1e-12 {
        return Err(Failure::new(
            exit::INTERNAL,
            format!("internal error: velocities inside a block differ by {mismatch:e} (relative)"),
        ));
    }
    let vs = nvgz::velocity::block_velocities(&p)?;
    Ok(format!(
        "{}\n",
        serde_json::to_string(&vs).expect("velocities serialize")
    ))
}

pub fn cmd_solve_velocity(energy: f64, c: Velocity) -> CmdResult<String> {
    let value = match solve_velocity_inverse(c, energy)? {
        InverseVelocity::Solved(set) => json!({
            "status": "solved",
            "lambdas": set.0.iter().map(|l| [l.re, l.im]).collect::<Vec<_>>(),
        }),
        InverseVelocity::Forbidden { bound } => json!({
            "status": "forbidden",
            "bound": bound,
        }),
    };
    Ok(line(serde_json::to_string(&value)))
}

pub fn cmd_residual(path: &Path, points: usize, seed: u64) -> CmdResult<String> {
    let p = load_valid(path)?;
    let ev = PotentialEvaluator::new_unchecked(p);
    let report = nv_residual(&ev, &SampleSpec::new(points, seed)).map_err(|e| {
        let mut f = Failure::from(e);
        if f.code == exit::VALIDATION {
            f.code = exit::EVALUATION;
        }
        f
    })?;
    Ok(line(serde_json::to_string_pretty(&report)))
}

pub fn cmd_asymptotics(
    path: &Path,
    block: usize,
    times: &[f64],
    radius: f64,
    probe: Velocity,
    out: Option<&PathBuf>,
) -> CmdResult {
    let p = load_valid(path)?;
    if block == 0 || block > p.blocks() {
        return Err(Failure::new(
            exit::VALIDATION,
            format!("block must be in 1..={}, got {block}", p.blocks()),
        ));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Failure::new(
            exit::VALIDATION,
            format!("window radius must be positive, got {radius}"),
        ));
    }
    let ev = PotentialEvaluator::new_unchecked(p);
    let report = asymptotic_error_sweep(&ev, block, times, &XiWindow::with_radius(radius), probe)?;
    emit(out, &line(serde_json::to_string_pretty(&report)))
}
