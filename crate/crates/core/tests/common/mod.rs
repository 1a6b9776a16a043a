#![allow(dead_code)]

use nvgz::{expand_blocks, BlockSeed, ParameterSet, PotentialEvaluator, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn sqrt2() -> f64 {
    2f64.sqrt()
}

/// N = 1, lambda = sqrt(2), gamma = 1, E = 1.
pub fn single() -> ParameterSet {
    expand_blocks(1.0, &[BlockSeed::new(c(sqrt2(), 0.0), c(1.0, 0.0))]).unwrap()
}

/// N = 2 with block velocities 21 and -19.5 at E = 1.
pub fn double() -> ParameterSet {
    expand_blocks(
        1.0,
        &[
            BlockSeed::new(c(sqrt2(), 0.0), c(1.0, 0.0)),
            BlockSeed::new(c(0.0, 2.0), c(0.5, 0.0)),
        ],
    )
    .unwrap()
}

pub fn triple() -> ParameterSet {
    expand_blocks(
        1.0,
        &[
            BlockSeed::new(c(sqrt2(), 0.0), c(1.0, 0.0)),
            BlockSeed::new(c(0.0, 2.0), c(0.5, 0.0)),
            BlockSeed::new(c(1.3, 1.1), c(-0.4, 0.3)),
        ],
    )
    .unwrap()
}

/// Five seeded sets covering N = 1, 2, 3 and non-unit energies.
pub fn residual_sets() -> Vec<(&'static str, ParameterSet)> {
    vec![
        ("N=1 E=1", single()),
        (
            "N=1 E=2.5",
            expand_blocks(2.5, &[BlockSeed::new(c(1.3, 0.7), c(0.5, -1.0))]).unwrap(),
        ),
        ("N=2 E=1", double()),
        (
            "N=2 E=0.7",
            expand_blocks(
                0.7,
                &[
                    BlockSeed::new(C64::from_polar(1.8, 0.4), c(0.0, 0.2)),
                    BlockSeed::new(c(0.45, -0.3), c(1.0, 1.0)),
                ],
            )
            .unwrap(),
        ),
        ("N=3 E=1", triple()),
    ]
}

pub fn eval(p: &ParameterSet) -> PotentialEvaluator {
    PotentialEvaluator::new(p.clone()).unwrap()
}

/// `A(z, zbar, t)` assembled straight from its definition, with `z` and
/// `zbar` treated as independent complex variables.
pub fn oracle_matrix(p: &ParameterSet, z: C64, zbar: C64, t: C64) -> Vec<Vec<C64>> {
    let l = p.lambdas();
    let g = p.gammas();
    let e = p.energy();
    let i = C64::i();
    let n = l.len();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    if a == b {
                        i * e.sqrt() / 2.0 * (zbar - z / (l[a] * l[a]))
                            - 3.0 * i * e.powf(1.5) * t * (l[a] * l[a] - 1.0 / l[a].powi(4))
                            - g[a]
                    } else {
                        1.0 / (l[a] - l[b])
                    }
                })
                .collect()
        })
        .collect()
}

/// Plain Gaussian elimination with partial pivoting.
pub fn oracle_det(mut m: Vec<Vec<C64>>) -> C64 {
    let n = m.len();
    let mut det = c(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap())
            .unwrap();
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        let pivot_row = m[col].clone();
        for row in m.iter_mut().skip(col + 1) {
            let f = row[col] / p;
            for (x, v) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x -= f * v;
            }
        }
    }
    det
}

/// Brute-force admissibility: does some `psi` solve
/// `u = s e^{-i psi} + e^{2 i psi}` with `|s| > 2`?
pub fn oracle_velocity_admissible(u: C64) -> bool {
    let h = |psi: f64| (u * C64::from_polar(1.0, psi)).im - (3.0 * psi).sin();
    let s = |psi: f64| (u * C64::from_polar(1.0, psi)).re - (3.0 * psi).cos();
    let steps = 20000;
    let dpsi = 2.0 * std::f64::consts::PI / steps as f64;
    for k in 0..steps {
        let (mut a, mut b) = (k as f64 * dpsi, (k + 1) as f64 * dpsi);
        let (mut ha, hb) = (h(a), h(b));
        if ha == 0.0 {
            if s(a).abs() > 2.0 {
                return true;
            }
            continue;
        }
        if ha * hb > 0.0 {
            continue;
        }
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            let hm = h(m);
            if ha * hm <= 0.0 {
                b = m;
            } else {
                a = m;
                ha = hm;
            }
        }
        if s(0.5 * (a + b)).abs() > 2.0 {
            return true;
        }
    }
    false
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Mixed partial of `ln det A` by Cauchy's formula on a product of small
/// circles in the complexified `(z, zbar, t)`, trapezoidal rule with `nodes`
/// points per circle. `dirs`: 0 = z, 1 = zbar, 2 = t.
///
/// The integrand is `Log det(I + A^-1 diag(delta))`, which stays close to
/// zero on the circles; each radius keeps `|A^-1 diag(delta)| <= 0.2`.
pub fn oracle_log_det_derivative(
    p: &ParameterSet,
    z: C64,
    t: f64,
    dirs: &[usize],
    nodes: usize,
) -> C64 {
    let e = p.energy();
    let i = C64::i();
    let inv = oracle_inverse(oracle_matrix(p, z, z.conj(), c(t, 0.0)));
    let inv_norm = inv
        .iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let rate = |d: usize| -> f64 {
        p.lambdas()
            .iter()
            .map(|l| match d {
                0 => e.sqrt() / (2.0 * l.norm_sqr()),
                1 => e.sqrt() / 2.0,
                _ => 3.0 * e.powf(1.5) * (l * l - 1.0 / l.powi(4)).norm(),
            })
            .fold(0.0, f64::max)
    };
    let mut mult = [0usize; 3];
    for &d in dirs {
        mult[d] += 1;
    }
    let active: Vec<usize> = (0..3).filter(|&d| mult[d] > 0).collect();
    let radius: Vec<f64> = active
        .iter()
        .map(|&d| 0.2 / (active.len() as f64 * inv_norm * rate(d)))
        .collect();
    let g = |shift: [C64; 3]| -> C64 {
        let delta: Vec<C64> = p
            .lambdas()
            .iter()
            .map(|l| {
                i * e.sqrt() / 2.0 * (shift[1] - shift[0] / (l * l))
                    - 3.0 * i * e.powf(1.5) * shift[2] * (l * l - 1.0 / l.powi(4))
            })
            .collect();
        let n = delta.len();
        let m: Vec<Vec<C64>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|k| inv[r][k] * delta[k] + if r == k { c(1.0, 0.0) } else { c(0.0, 0.0) })
                    .collect()
            })
            .collect();
        oracle_det(m).ln()
    };
    let total = nodes.pow(active.len() as u32);
    let mut sum = c(0.0, 0.0);
    for flat in 0..total {
        let mut shift = [c(0.0, 0.0); 3];
        let mut phase = 0.0;
        let mut rest = flat;
        for (k, &d) in active.iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * (rest % nodes) as f64 / nodes as f64;
            rest /= nodes;
            shift[d] = C64::from_polar(radius[k], theta);
            phase -= mult[d] as f64 * theta;
        }
        sum += g(shift) * C64::from_polar(1.0, phase);
    }
    let mut scale = 1.0 / total as f64;
    for (k, &d) in active.iter().enumerate() {
        let fact: f64 = (1..=mult[d]).map(|x| x as f64).product();
        scale *= fact / radius[k].powi(mult[d] as i32);
    }
    sum * scale
}

/// Mixed partial of `ln det A` by nested central differences of
/// `Log det(I + A^-1 diag(delta))` along real shifts of `(x1, x2, t)`,
/// converted to Wirtinger form, with `levels` rounds of Richardson
/// extrapolation. `dirs`: 0 = z, 1 = zbar, 2 = t.
///
/// The step along each coordinate is `h / (|A^-1| * |dA|)` for that
/// coordinate, so `h` is dimensionless.
pub fn oracle_log_det_fd(
    p: &ParameterSet,
    z: C64,
    t: f64,
    dirs: &[usize],
    h: f64,
    levels: usize,
) -> C64 {
    let e = p.energy();
    let i = C64::i();
    let inv = oracle_inverse(oracle_matrix(p, z, z.conj(), c(t, 0.0)));
    let inv_norm = inv
        .iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let rate_x = p
        .lambdas()
        .iter()
        .map(|l| e.sqrt() / 2.0 * (1.0 + 1.0 / l.norm_sqr()))
        .fold(0.0, f64::max);
    let rate_t = p
        .lambdas()
        .iter()
        .map(|l| 3.0 * e.powf(1.5) * (l * l - 1.0 / l.powi(4)).norm())
        .fold(0.0, f64::max);
    let base = [
        h / (inv_norm * rate_x),
        h / (inv_norm * rate_x),
        h / (inv_norm * rate_t),
    ];
    // real coordinates: 0 = x1, 1 = x2, 2 = t
    let g = |shift: [f64; 3]| -> C64 {
        let dz = c(shift[0], shift[1]);
        let n = inv.len();
        let delta: Vec<C64> = p
            .lambdas()
            .iter()
            .map(|l| {
                i * e.sqrt() / 2.0 * (dz.conj() - dz / (l * l))
                    - 3.0 * i * e.powf(1.5) * shift[2] * (l * l - 1.0 / l.powi(4))
            })
            .collect();
        let m: Vec<Vec<C64>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|k| inv[r][k] * delta[k] + if r == k { c(1.0, 0.0) } else { c(0.0, 0.0) })
                    .collect()
            })
            .collect();
        oracle_det(m).ln()
    };
    fn nested(g: &dyn Fn([f64; 3]) -> C64, dirs: &[usize], shift: [f64; 3], h: [f64; 3]) -> C64 {
        match dirs.split_first() {
            None => g(shift),
            Some((&d, rest)) => {
                let mut up = shift;
                let mut down = shift;
                up[d] += h[d];
                down[d] -= h[d];
                (nested(g, rest, up, h) - nested(g, rest, down, h)) / (2.0 * h[d])
            }
        }
    }
    // expand each Wirtinger factor: d_z = (d1 - i d2)/2, d_zbar = (d1 + i d2)/2
    let mut terms: Vec<(C64, Vec<usize>)> = vec![(c(1.0, 0.0), vec![])];
    for &d in dirs {
        let parts: Vec<(C64, usize)> = match d {
            0 => vec![(c(0.5, 0.0), 0), (c(0.0, -0.5), 1)],
            1 => vec![(c(0.5, 0.0), 0), (c(0.0, 0.5), 1)],
            _ => vec![(c(1.0, 0.0), 2)],
        };
        terms = terms
            .iter()
            .flat_map(|(w, v)| {
                parts.iter().map(move |(pw, pd)| {
                    let mut v = v.clone();
                    v.push(*pd);
                    (w * pw, v)
                })
            })
            .collect();
    }
    let d = |scale: f64| -> C64 {
        let h = base.map(|b| b * scale);
        terms
            .iter()
            .map(|(w, v)| w * nested(&g, v, [0.0; 3], h))
            .sum()
    };
    let mut table: Vec<C64> = (0..=levels).map(|k| d(0.5f64.powi(k as i32))).collect();
    for level in 1..=levels {
        let f = 4f64.powi(level as i32);
        table = table
            .windows(2)
            .map(|w| (f * w[1] - w[0]) / (f - 1.0))
            .collect();
    }
    table[0]
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn oracle_inverse(mut m: Vec<Vec<C64>>) -> Vec<Vec<C64>> {
    let n = m.len();
    let mut inv: Vec<Vec<C64>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|k| if r == k { c(1.0, 0.0) } else { c(0.0, 0.0) })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap())
            .unwrap();
        m.swap(piv, col);
        inv.swap(piv, col);
        let p = m[col][col];
        for k in 0..n {
            m[col][k] /= p;
            inv[col][k] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                for k in 0..n {
                    let (a, b) = (m[col][k], inv[col][k]);
                    m[r][k] -= f * a;
                    inv[r][k] -= f * b;
                }
            }
        }
    }
    inv
}
