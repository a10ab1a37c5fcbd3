//! Derivative-free optimization helpers shared by the discord, EOF-ensemble
//! and relative-entropy optimizers: Nelder-Mead with best-ever tracking,
//! golden-section line search, and angle parameterizations of unitaries and
//! pure states.

use num_complex::Complex64;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::linalg::ComplexMatrix;

/// Multi-start optimizer settings.
///
/// Start `k` depends only on `(seed, k)`, so enlarging `starts` or `iters`
/// extends the search without disturbing earlier starts; reported optima are
/// monotone in the budget.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Budget {
    pub starts: usize,
    pub iters: usize,
    pub seed: u64,
    pub simplex_tol: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            starts: 24,
            iters: 200,
            seed: 0,
            simplex_tol: 1e-8,
        }
    }
}

impl Budget {
    /// Default for the ensemble-minimization oracle. Weakly entangled
    /// states hide the optimal basin from most starts, so the default start
    /// count is generous.
    pub fn oracle_default() -> Self {
        Self {
            starts: 48,
            iters: 2500,
            seed: 0,
            simplex_tol: 1e-9,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn scaled(mut self, factor: usize) -> Self {
        self.starts *= factor;
        self.iters *= factor;
        self
    }
}

#[derive(Debug, Clone)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evals: usize,
    pub simplex_size: f64,
}

/// Standard Nelder-Mead simplex minimization with deterministic
/// shrink-restarts: when the simplex collapses below `tol` and iterations
/// remain, it is rebuilt around the incumbent with a smaller step and the
/// search continues. The returned point is the best ever evaluated, so
/// extending `max_iters` can only improve the result.
pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_iters: usize,
    tol: f64,
) -> NmResult {
    let n = x0.len();
    if n == 0 {
        let value = f(x0);
        return NmResult {
            x: x0.to_vec(),
            value,
            iterations: 0,
            evals: 1,
            simplex_size: 0.0,
        };
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x)
    };

    let build_simplex = |center: &[f64], h: f64| -> Vec<Vec<f64>> {
        let mut s = Vec::with_capacity(n + 1);
        s.push(center.to_vec());
        for i in 0..n {
            let mut v = center.to_vec();
            v[i] += h;
            s.push(v);
        }
        s
    };

    let mut restart_step = step;
    let mut simplex = build_simplex(x0, restart_step);
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();

    let mut best_x = simplex[0].clone();
    let mut best_v = values[0];
    for (x, &v) in simplex.iter().zip(values.iter()) {
        if v < best_v {
            best_v = v;
            best_x = x.clone();
        }
    }

    let mut iterations = 0usize;
    let mut spread = f64::INFINITY;
    while iterations < max_iters {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = revalues;

        spread = simplex[1..]
            .iter()
            .map(|x| {
                x.iter()
                    .zip(simplex[0].iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let fspread = values[n] - values[0];
        if spread < tol && fspread.abs() < tol {
            if restart_step < 16.0 * tol {
                break;
            }
            // restart around the incumbent with a smaller simplex
            restart_step *= 0.1;
            simplex = build_simplex(&best_x, restart_step);
            values = simplex.iter().map(|x| eval(x, &mut evals)).collect();
            for (x, &v) in simplex.iter().zip(values.iter()) {
                if v < best_v {
                    best_v = v;
                    best_x = x.clone();
                }
            }
            continue;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|x| x[d]).sum::<f64>() / n as f64)
            .collect();
        let reflect: Vec<f64> = (0..n)
            .map(|d| centroid[d] + alpha * (centroid[d] - simplex[n][d]))
            .collect();
        let fr = eval(&reflect, &mut evals);
        if fr < best_v {
            best_v = fr;
            best_x = reflect.clone();
        }

        if fr < values[0] {
            // try expansion
            let expand: Vec<f64> = (0..n)
                .map(|d| centroid[d] + gamma * (reflect[d] - centroid[d]))
                .collect();
            let fe = eval(&expand, &mut evals);
            if fe < best_v {
                best_v = fe;
                best_x = expand.clone();
            }
            if fe < fr {
                simplex[n] = expand;
                values[n] = fe;
            } else {
                simplex[n] = reflect;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflect;
            values[n] = fr;
        } else {
            // contraction
            let (point, fp) = if fr < values[n] {
                let outside: Vec<f64> = (0..n)
                    .map(|d| centroid[d] + rho * (reflect[d] - centroid[d]))
                    .collect();
                let v = eval(&outside, &mut evals);
                (outside, v)
            } else {
                let inside: Vec<f64> = (0..n)
                    .map(|d| centroid[d] - rho * (centroid[d] - simplex[n][d]))
                    .collect();
                let v = eval(&inside, &mut evals);
                (inside, v)
            };
            if fp < best_v {
                best_v = fp;
                best_x = point.clone();
            }
            if fp < values[n] {
                simplex[n] = point;
                values[n] = fp;
            } else {
                // shrink toward the best vertex
                for i in 1..=n {
                    for d in 0..n {
                        simplex[i][d] = simplex[0][d] + sigma * (simplex[i][d] - simplex[0][d]);
                    }
                    values[i] = eval(&simplex[i].clone(), &mut evals);
                    if values[i] < best_v {
                        best_v = values[i];
                        best_x = simplex[i].clone();
                    }
                }
            }
        }
    }

    NmResult {
        x: best_x,
        value: best_v,
        iterations,
        evals,
        simplex_size: spread,
    }
}

/// Deterministic start vectors: the provided canonical points first, then
/// seeded uniform draws in [0, 2 pi) indexed by start number.
pub fn start_points(n_params: usize, canonical: &[Vec<f64>], starts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(starts);
    for c in canonical.iter().take(starts) {
        assert_eq!(c.len(), n_params);
        out.push(c.clone());
    }
    let mut k = out.len();
    while out.len() < starts {
        let mut rng =
            ChaCha12Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let v: Vec<f64> = (0..n_params)
            .map(|_| {
                let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                u * 2.0 * std::f64::consts::PI
            })
            .collect();
        out.push(v);
        k += 1;
    }
    out
}

/// Outcome of a multi-start minimization, with the trace data reports carry.
#[derive(Debug, Clone)]
pub struct MultiStartResult {
    pub best: NmResult,
    pub starts: usize,
    pub total_evals: usize,
}

/// Runs Nelder-Mead from every start and keeps the best (first found wins
/// ties, so results are reproducible).
///
/// Every start is an independent deterministic run and the winner is the
/// best point ever evaluated, so a run with a larger budget evaluates a
/// strict superset of points and can never report a worse optimum.
pub fn minimize_multistart(
    f: &mut dyn FnMut(&[f64]) -> f64,
    canonical: &[Vec<f64>],
    n_params: usize,
    budget: &Budget,
) -> MultiStartResult {
    let starts = start_points(n_params, canonical, budget.starts.max(1), budget.seed);
    let mut best: Option<NmResult> = None;
    let mut total_evals = 0usize;
    for s in &starts {
        let r = nelder_mead(f, s, 0.4, budget.iters, budget.simplex_tol);
        total_evals += r.evals;
        let better = match &best {
            None => true,
            Some(b) => r.value < b.value - 1e-15,
        };
        if better {
            best = Some(r);
        }
    }
    MultiStartResult {
        best: best.expect("at least one start"),
        starts: starts.len(),
        total_evals,
    }
}

/// Golden-section minimization of a unimodal function on [a, b].
pub fn golden_section(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Number of angles parameterizing a `dim x dim` unitary (up to column
/// phases): one rotation and one phase per plane.
pub fn n_unitary_angles(dim: usize) -> usize {
    dim * (dim - 1)
}

/// Unitary from a product of complex Givens rotations over all planes
/// `(i, j)`, `i < j`. Column phases are omitted; they do not affect the
/// projective measurements and ensembles built from the columns.
pub fn unitary_from_angles(dim: usize, angles: &[f64]) -> ComplexMatrix {
    assert_eq!(angles.len(), n_unitary_angles(dim));
    let mut u = ComplexMatrix::identity(dim);
    let mut k = 0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let t = angles[k];
            let phase = angles[k + 1];
            k += 2;
            let c = t.cos();
            let s = t.sin();
            let e = Complex64::new(phase.cos(), phase.sin());
            // right-multiply by the Givens rotation in the (i, j) plane
            for row in 0..dim {
                let ui = u[(row, i)];
                let uj = u[(row, j)];
                u[(row, i)] = ui * c + uj * s * e.conj();
                u[(row, j)] = -ui * s * e + uj * c;
            }
        }
    }
    u
}

/// Number of angles parameterizing a pure state in C^dim (hyperspherical
/// magnitudes plus relative phases).
pub fn n_state_angles(dim: usize) -> usize {
    2 * (dim - 1)
}

/// Pure state from hyperspherical angles: `dim - 1` polar angles fix the
/// magnitudes, `dim - 1` phases multiply components 1..dim.
pub fn pure_state_from_angles(dim: usize, angles: &[f64]) -> Vec<Complex64> {
    assert_eq!(angles.len(), n_state_angles(dim));
    let polar = &angles[..dim - 1];
    let phases = &angles[dim - 1..];
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    let mut sin_prod = 1.0;
    for i in 0..dim {
        let mag = if i < dim - 1 {
            let m = sin_prod * polar[i].cos();
            sin_prod *= polar[i].sin();
            m
        } else {
            sin_prod
        };
        let ph = if i == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(phases[i - 1].cos(), phases[i - 1].sin())
        };
        v[i] = ph * mag;
    }
    v
}

/// Inverse of [`pure_state_from_angles`] up to global phase.
pub fn angles_from_pure_state(v: &[Complex64]) -> Vec<f64> {
    let dim = v.len();
    // strip the global phase so component 0 is real non-negative
    let g = if v[0].norm() > 1e-14 {
        v[0] / v[0].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let w: Vec<Complex64> = v.iter().map(|z| z * g.conj()).collect();
    let mut polar = vec![0.0; dim - 1];
    let mut sin_prod = 1.0f64;
    for i in 0..dim - 1 {
        let mag = w[i].norm();
        let ratio = if sin_prod > 1e-14 {
            (mag / sin_prod).clamp(0.0, 1.0)
        } else {
            0.0
        };
        polar[i] = ratio.acos();
        sin_prod *= polar[i].sin();
    }
    let phases: Vec<f64> = (1..dim).map(|i| w[i].im.atan2(w[i].re)).collect();
    polar.into_iter().chain(phases).collect()
}
