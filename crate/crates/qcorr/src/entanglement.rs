//! Entanglement measures and irreversibility reports.
//!
//! Closed-form two-qubit quantities (concurrence, EOF) sit next to three
//! independent numerical routes: an ensemble-minimization EOF oracle, the
//! Koashi-Winter combination of discord and conditional entropy, and a
//! relative-entropy-of-entanglement estimator over explicit product-state
//! mixtures. The report builders combine them into exact-by-theorem values
//! for one-way maximally correlated states and honest bounds elsewhere.

use num_complex::Complex64;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::correlations::{discord, zero_discord_check, DiscordResult};
use crate::entropy::{binary_entropy, conditional_entropy, entropy_of_eigenvalues};
use crate::linalg::{hermitian_eig, partial_inner, ComplexMatrix};
use crate::optim::{
    golden_section, minimize_multistart, n_state_angles, n_unitary_angles, nelder_mead,
    pure_state_from_angles, unitary_from_angles, Budget,
};
use crate::states::{
    example_family, is_ppt, make_one_mc, purify, DensityMatrix, ExampleFamilyParams, OneMcSpec,
    PptVerdict, PureState,
};
use crate::{Error, Result};

/// How a reported number is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Pinned by a proven identity for the state family at hand.
    ExactByTheorem,
    /// Equals the single-copy EOF because EOF is additive for the state.
    ExactByAdditivity,
    /// Numerical lower/upper bounds only.
    Bounds,
}

/// A value known exactly or as an interval.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundValue {
    pub lower: f64,
    pub upper: f64,
    pub provenance: Provenance,
}

impl BoundValue {
    pub fn exact(v: f64, provenance: Provenance) -> Self {
        Self {
            lower: v,
            upper: v,
            provenance,
        }
    }

    pub fn bounds(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            provenance: Provenance::Bounds,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.provenance != Provenance::Bounds
    }

    /// The exact value; meaningful only when `is_exact()`.
    pub fn value(&self) -> f64 {
        self.lower
    }
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.sig().dims() != [2, 2] {
        return Err(Error::UnsupportedSignature {
            what: "two-qubit measure",
            detail: format!("dims {:?}", rho.sig().dims()),
        });
    }
    Ok(())
}

/// Spin-flip matrix Y (x) Y (real in the computational basis).
fn yy_matrix() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m
}

fn matrix_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (w, v) = hermitian_eig(m)?;
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let s = w[k].max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += v[(i, k)] * v[(j, k)].conj() * s;
            }
        }
    }
    Ok(out)
}

/// Wootters concurrence: `max{0, s1 - s2 - s3 - s4}` with `s_i` the square
/// roots of the descending eigenvalues of `rho (YY) rho* (YY)`.
pub fn concurrence_2q(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let yy = yy_matrix();
    let sq = matrix_sqrt_psd(rho.matrix())?;
    let flipped = yy.mul(&rho.matrix().conj()).mul(&yy);
    let a = sq.mul(&flipped).mul(&sq).symmetrized();
    let (w, _) = hermitian_eig(&a)?;
    // eigensolver noise on exact zeros would blow up under the square root,
    // so clip relative to the leading eigenvalue before taking roots
    let floor = w[3].max(0.0) * 1e-12;
    let s: Vec<f64> = w
        .iter()
        .rev()
        .map(|&x| if x > floor { x.sqrt() } else { 0.0 })
        .collect();
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// Two-qubit EOF through the concurrence: `h((1 + sqrt(1 - C^2))/2)`.
pub fn eof_2q(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence_2q(rho)?;
    binary_entropy((1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0)
}

/// A size-m pure-state ensemble realizing a density matrix.
#[derive(Debug, Clone)]
pub struct EnsembleDecomposition {
    pub weights: Vec<f64>,
    pub members: Vec<PureState>,
    pub isometry_params: Vec<f64>,
}

impl EnsembleDecomposition {
    /// Max entrywise deviation of `sum_i w_i |psi_i><psi_i|` from `rho`.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        let n = rho.dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for (w, psi) in self.weights.iter().zip(self.members.iter()) {
            let amps = psi.amplitudes();
            for i in 0..n {
                for j in 0..n {
                    acc[(i, j)] += amps[i] * amps[j].conj() * Complex64::new(*w, 0.0);
                }
            }
        }
        acc.max_abs_diff(rho.matrix())
    }
}

/// Ensemble-minimization EOF oracle.
///
/// Every size-m ensemble of `rho` arises from an m-column isometry applied
/// to the eigen-ensemble, so minimizing the average entanglement entropy of
/// the members over the isometry angles upper-bounds the EOF; the bound is
/// non-increasing in the budget.
pub fn eof_ensemble_oracle(
    rho: &DensityMatrix,
    left: &[&str],
    m: usize,
    budget: &Budget,
) -> Result<(f64, EnsembleDecomposition)> {
    if rho.dim() > 16 {
        return Err(Error::UnsupportedDimension {
            what: "ensemble oracle",
            dim: rho.dim(),
            limit: 16,
        });
    }
    let sig = rho.sig().clone();
    let left_pos = sig.positions(left)?;
    if left_pos.is_empty() || left_pos.len() == sig.len() {
        return Err(Error::TrivialBipartition);
    }
    let (w, v) = hermitian_eig(rho.matrix())?;
    let kept: Vec<usize> = (0..w.len())
        .filter(|&k| w[k] > crate::states::RANK_CUTOFF)
        .collect();
    let rank = kept.len();
    if m < rank || m > rank * rank {
        return Err(Error::EnsembleSizeOutOfRange {
            m,
            min: rank,
            max: rank * rank,
        });
    }
    let d = rho.dim();
    // subnormalized eigen-ensemble vectors
    let roots: Vec<Vec<Complex64>> = kept
        .iter()
        .map(|&k| {
            let c = Complex64::new(w[k].max(0.0).sqrt(), 0.0);
            (0..d).map(|i| v[(i, k)] * c).collect()
        })
        .collect();

    // flat index -> (left block, right block) for the entanglement entropy
    let right_pos: Vec<usize> = (0..sig.len()).filter(|p| !left_pos.contains(p)).collect();
    let dl: usize = left_pos.iter().map(|&p| sig.dims()[p]).product();
    let dr: usize = right_pos.iter().map(|&p| sig.dims()[p]).product();
    let mut perm = vec![0usize; d];
    {
        let dims = sig.dims();
        for idx in 0..d {
            let mut rem = idx;
            let mut digits = vec![0usize; dims.len()];
            for k in (0..dims.len()).rev() {
                digits[k] = rem % dims[k];
                rem /= dims[k];
            }
            let mut li = 0usize;
            for &p in &left_pos {
                li = li * dims[p] + digits[p];
            }
            let mut ri = 0usize;
            for &p in &right_pos {
                ri = ri * dims[p] + digits[p];
            }
            perm[idx] = li * dr + ri;
        }
    }

    let n_angles = n_unitary_angles(m);
    let roots_ref = &roots;
    let perm_ref = &perm;
    let objective = |angles: &[f64]| -> f64 {
        let u = unitary_from_angles(m, angles);
        let mut avg = 0.0;
        for j in 0..m {
            // member j of the rotated ensemble
            let mut vecj = vec![Complex64::new(0.0, 0.0); d];
            for (i, root) in roots_ref.iter().enumerate() {
                let uji = u[(j, i)];
                if uji.norm_sqr() < 1e-300 {
                    continue;
                }
                for (t, z) in root.iter().enumerate() {
                    vecj[t] += uji * z;
                }
            }
            let p: f64 = vecj.iter().map(|z| z.norm_sqr()).sum();
            if p <= 1e-12 {
                continue;
            }
            // entanglement entropy of the member across the bipartition
            let mut mat = ComplexMatrix::zeros(dl, dr);
            for (idx, z) in vecj.iter().enumerate() {
                let t = perm_ref[idx];
                mat[(t / dr, t % dr)] = *z;
            }
            let rl = mat.mul(&mat.dagger()).scaled_re(1.0 / p);
            let (ew, _) = hermitian_eig(&rl.symmetrized()).expect("Hermitian by construction");
            avg += p * entropy_of_eigenvalues(&ew);
        }
        avg
    };

    let canonical = vec![vec![0.0; n_angles], vec![std::f64::consts::FRAC_PI_4; n_angles]];
    let res = minimize_multistart(&mut |x| objective(x), &canonical, n_angles, budget);

    // plane-by-plane polish: each Givens pair is refined on its own, which
    // walks the long flat valleys near the separable boundary that the
    // full-dimensional simplex cannot
    let mut best_angles = res.best.x.clone();
    let mut best_val = res.best.value;
    for _sweep in 0..80 {
        let mut improved = false;
        for plane in 0..n_angles / 2 {
            let k = 2 * plane;
            let base = best_angles.clone();
            let mut plane_obj = |xy: &[f64]| -> f64 {
                let mut a = base.clone();
                a[k] = xy[0];
                a[k + 1] = xy[1];
                objective(&a)
            };
            let r = nelder_mead(&mut plane_obj, &[base[k], base[k + 1]], 0.3, 90, 1e-11);
            if r.value < best_val - 1e-15 {
                best_val = r.value;
                best_angles[k] = r.x[0];
                best_angles[k + 1] = r.x[1];
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }

    // rebuild the winning decomposition
    let u = unitary_from_angles(m, &best_angles);
    let mut weights = Vec::new();
    let mut members = Vec::new();
    for j in 0..m {
        let mut vecj = vec![Complex64::new(0.0, 0.0); d];
        for (i, root) in roots.iter().enumerate() {
            for (t, z) in root.iter().enumerate() {
                vecj[t] += u[(j, i)] * z;
            }
        }
        let p: f64 = vecj.iter().map(|z| z.norm_sqr()).sum();
        if p <= 1e-12 {
            continue;
        }
        let norm = p.sqrt();
        for z in &mut vecj {
            *z /= norm;
        }
        weights.push(p);
        members.push(PureState::new(vecj, sig.clone())?);
    }
    Ok((
        best_val,
        EnsembleDecomposition {
            weights,
            members,
            isometry_params: best_angles,
        },
    ))
}

/// EOF of `rho_ab` through the tripartite identity: discord of `rho_ac`
/// measured on `c`, minus the conditional entropy of `rho_ab`.
///
/// Since the variational J underestimates the classical correlation, the
/// discord term and hence the returned value over-approach the exact EOF
/// from one side.
pub fn eof_via_koashi_winter(psi: &PureState, budget: &Budget) -> Result<f64> {
    let sig = psi.sig();
    if sig.len() != 3 {
        return Err(Error::NotTripartite {
            subsystems: sig.len(),
        });
    }
    let labels = sig.labels();
    let (a, b, c) = (labels[0], labels[1], labels[2]);
    if sig.dims()[2] > crate::correlations::MEASURED_DIM_LIMIT {
        return Err(Error::UnsupportedDimension {
            what: "purifying subsystem",
            dim: sig.dims()[2],
            limit: crate::correlations::MEASURED_DIM_LIMIT,
        });
    }
    let rho_ac = psi.reduced(&[a, c])?;
    let rho_ab = psi.reduced(&[a, b])?;
    let d = discord(&rho_ac, a, c, budget)?;
    let s_cond = conditional_entropy(&rho_ab, a, b)?;
    Ok(d.discord - s_cond)
}

// ---------------------------------------------------------------------------
// Relative entropy of entanglement
// ---------------------------------------------------------------------------

/// Settings for the REE estimator: a witness of at most `terms` product
/// states refined by atom insertion (steepest-descent direction over the
/// separable set), simplex re-weighting, and per-atom angle refinement.
#[derive(Debug, Clone, Copy)]
pub struct ReeBudget {
    pub terms: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop when the relative improvement over this many iterations falls
    /// below `rel_tol`.
    pub window: usize,
    pub rel_tol: f64,
    /// Stop when the linear optimality gap falls below this.
    pub gap_tol: f64,
    pub seed: u64,
}

impl Default for ReeBudget {
    fn default() -> Self {
        Self {
            terms: 16,
            restarts: 3,
            max_iters: 60,
            window: 50,
            rel_tol: 1e-8,
            gap_tol: 1e-9,
            seed: 0,
        }
    }
}

/// REE upper bound with its witness.
#[derive(Debug, Clone)]
pub struct ReeEstimate {
    pub value: f64,
    pub witness: DensityMatrix,
    /// True when the input passed the PPT separability certificate and the
    /// value 0 is exact with the state as its own witness.
    pub ppt_certified: bool,
    pub fw_gap: f64,
    pub iterations: usize,
}

#[derive(Clone)]
struct ProductAtom {
    x: Vec<Complex64>,
    y: Vec<Complex64>,
    weight: f64,
}

impl ProductAtom {
    fn matrix(&self, dims: (usize, usize)) -> ComplexMatrix {
        let (d0, d1) = dims;
        ComplexMatrix::from_fn(d0 * d1, d0 * d1, |r, c| {
            let (i0, i1) = (r / d1, r % d1);
            let (j0, j1) = (c / d1, c % d1);
            self.x[i0] * self.x[j0].conj() * self.y[i1] * self.y[j1].conj()
        })
    }

    /// `<x (x) y| m |x (x) y>` as a direct quadratic form.
    fn expectation(&self, m: &ComplexMatrix, dims: (usize, usize)) -> f64 {
        let (d0, d1) = dims;
        let mut acc = Complex64::new(0.0, 0.0);
        for i0 in 0..d0 {
            for i1 in 0..d1 {
                let bra = (self.x[i0] * self.y[i1]).conj();
                for j0 in 0..d0 {
                    for j1 in 0..d1 {
                        acc += bra * m[(i0 * d1 + i1, j0 * d1 + j1)] * self.x[j0] * self.y[j1];
                    }
                }
            }
        }
        acc.re
    }
}

const SIGMA_FLOOR: f64 = 1e-12;

struct ReeProblem {
    rho: ComplexMatrix,
    dims: (usize, usize),
    /// Tr rho log2 rho.
    tr_rho_log_rho: f64,
}

impl ReeProblem {
    fn sigma_matrix(&self, atoms: &[ProductAtom]) -> ComplexMatrix {
        let d = self.rho.rows();
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        let mut m = ComplexMatrix::zeros(d, d);
        for a in atoms {
            let p = a.matrix(self.dims);
            let w = Complex64::new(a.weight / total * (1.0 - SIGMA_FLOOR), 0.0);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += p[(i, j)] * w;
                }
            }
        }
        for i in 0..d {
            m[(i, i)] += Complex64::new(SIGMA_FLOOR / d as f64, 0.0);
        }
        m.symmetrized()
    }

    /// S(rho || sigma) in bits given sigma's eigensystem.
    fn value_from_eig(&self, w: &[f64], v: &ComplexMatrix) -> f64 {
        let d = self.rho.rows();
        let mut tr_rho_log_sigma = 0.0;
        for k in 0..d {
            let col = v.column(k);
            let mut diag = 0.0;
            for i in 0..d {
                for j in 0..d {
                    diag += (col[i].conj() * self.rho[(i, j)] * col[j]).re;
                }
            }
            tr_rho_log_sigma += diag * w[k].max(1e-300).log2();
        }
        self.tr_rho_log_rho - tr_rho_log_sigma
    }

    fn value(&self, atoms: &[ProductAtom]) -> f64 {
        let sigma = self.sigma_matrix(atoms);
        let (w, v) = hermitian_eig(&sigma).expect("sigma Hermitian");
        self.value_from_eig(&w, &v)
    }

    /// Negative gradient of -Tr rho log2 sigma: the operator whose largest
    /// product expectation gives the steepest feasible descent direction.
    fn descent_matrix(&self, w: &[f64], v: &ComplexMatrix) -> ComplexMatrix {
        let d = self.rho.rows();
        let rho_t = v.dagger().mul(&self.rho).mul(v);
        let mut lt = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let (wi, wj) = (w[i].max(1e-15), w[j].max(1e-15));
                let k = if (wi - wj).abs() < 1e-12 * wi.max(wj) {
                    1.0 / wi
                } else {
                    (wi.ln() - wj.ln()) / (wi - wj)
                };
                lt[(i, j)] = rho_t[(i, j)] * (k / std::f64::consts::LN_2);
            }
        }
        v.mul(&lt).mul(&v.dagger()).symmetrized()
    }
}

fn top_eigvec(m: &ComplexMatrix) -> Vec<Complex64> {
    let (_, v) = hermitian_eig(&m.symmetrized()).expect("Hermitian");
    v.column(m.rows() - 1)
}

/// Maximizes `<x (x) y| L |x (x) y>` over product vectors by alternating
/// eigenvector iterations from deterministic starts.
fn best_product_vector(
    l: &ComplexMatrix,
    dims: (usize, usize),
) -> (Vec<Complex64>, Vec<Complex64>, f64) {
    let (d0, d1) = dims;
    let mut starts: Vec<Vec<Complex64>> = Vec::new();
    for k in 0..d0 {
        let mut e = vec![Complex64::new(0.0, 0.0); d0];
        e[k] = Complex64::new(1.0, 0.0);
        starts.push(e);
    }
    starts.push(vec![
        Complex64::new(1.0 / (d0 as f64).sqrt(), 0.0);
        d0
    ]);
    // best rank-1 factor of the top eigenvector
    let top = top_eigvec(l);
    let z = ComplexMatrix::from_fn(d0, d1, |i, j| top[i * d1 + j]);
    starts.push(top_eigvec(&z.mul(&z.dagger())));

    let normalize = |v: &mut Vec<Complex64>| {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-300 {
            for z in v.iter_mut() {
                *z /= n;
            }
        }
    };

    let expectation = |x: &[Complex64], mx: &ComplexMatrix| -> f64 {
        let mut val = 0.0;
        for i in 0..d0 {
            for j in 0..d0 {
                val += (x[i].conj() * mx[(i, j)] * x[j]).re;
            }
        }
        val
    };
    let mut best: Option<(Vec<Complex64>, Vec<Complex64>, f64)> = None;
    for x0 in starts {
        let mut x = x0;
        normalize(&mut x);
        let mut y = vec![Complex64::new(0.0, 0.0); d1];
        let mut last = f64::NEG_INFINITY;
        for _ in 0..14 {
            let my = partial_inner(l, dims, 0, &x);
            y = top_eigvec(&my);
            let mx = partial_inner(l, dims, 1, &y);
            x = top_eigvec(&mx);
            let val = expectation(&x, &mx);
            if val - last < 1e-13 * val.abs().max(1.0) {
                break;
            }
            last = val;
        }
        let mx = partial_inner(l, dims, 1, &y);
        let val = expectation(&x, &mx);
        if best.as_ref().is_none_or(|b| val > b.2) {
            best = Some((x, y, val));
        }
    }
    best.expect("at least one start")
}

/// Splits a classical-quantum pinch of `rho` in the basis minimizing the
/// pinched entropy into product atoms; the resulting mixture is separable
/// and its relative entropy to `rho` equals the entropy increase.
fn pinch_atoms(
    rho: &ComplexMatrix,
    dims: (usize, usize),
    side: usize,
    budget: &Budget,
) -> Vec<ProductAtom> {
    let dm = if side == 0 { dims.0 } else { dims.1 };
    let n = n_unitary_angles(dm);
    let mut objective = |angles: &[f64]| -> f64 {
        let u = unitary_from_angles(dm, angles);
        let mut eigs = Vec::with_capacity(dims.0 * dims.1);
        for k in 0..dm {
            let block = partial_inner(rho, dims, side, &u.column(k)).symmetrized();
            let (w, _) = hermitian_eig(&block).expect("Hermitian");
            eigs.extend(w);
        }
        entropy_of_eigenvalues(&eigs)
    };
    let canonical = vec![vec![0.0; n], vec![std::f64::consts::FRAC_PI_4; n]];
    let res = minimize_multistart(&mut objective, &canonical, n, budget);
    let u = unitary_from_angles(dm, &res.best.x);
    let mut atoms = Vec::new();
    for k in 0..dm {
        let basis_vec = u.column(k);
        let block = partial_inner(rho, dims, side, &basis_vec).symmetrized();
        let (w, v) = hermitian_eig(&block).expect("Hermitian");
        for (i, &wi) in w.iter().enumerate() {
            if wi <= 1e-12 {
                continue;
            }
            let other = v.column(i);
            let (x, y) = if side == 1 {
                (other, basis_vec.clone())
            } else {
                (basis_vec.clone(), other)
            };
            atoms.push(ProductAtom { x, y, weight: wi });
        }
    }
    atoms
}

fn random_atom(dims: (usize, usize), rng: &mut ChaCha12Rng) -> ProductAtom {
    let mut draw = |d: usize| -> Vec<Complex64> {
        let mut v: Vec<Complex64> = (0..d)
            .map(|_| {
                let u1 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                Complex64::new(u1 - 0.5, u2 - 0.5)
            })
            .collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= n;
        }
        v
    };
    ProductAtom {
        x: draw(dims.0),
        y: draw(dims.1),
        weight: 1e-3,
    }
}

fn renormalize(atoms: &mut [ProductAtom]) {
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    for a in atoms.iter_mut() {
        a.weight /= total;
    }
}

/// Convex re-weighting of fixed atoms: multiplicative updates with a
/// golden-section step search along the update curve.
fn reweight(problem: &ReeProblem, atoms: &mut Vec<ProductAtom>, iters: usize) -> f64 {
    let mut current = problem.value(atoms);
    for _ in 0..iters {
        let sigma = problem.sigma_matrix(atoms);
        let (w, v) = hermitian_eig(&sigma).expect("Hermitian");
        let l = problem.descent_matrix(&w, &v);
        let g: Vec<f64> = atoms
            .iter()
            .map(|a| a.expectation(&l, problem.dims))
            .collect();
        let gmax = g.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1e-300);
        let base: Vec<ProductAtom> = atoms.clone();
        let at_eta = |eta: f64| -> (Vec<ProductAtom>, f64) {
            let mut trial = base.clone();
            for (a, &gk) in trial.iter_mut().zip(g.iter()) {
                a.weight *= (eta * gk / gmax).exp();
            }
            renormalize(&mut trial);
            let val = problem.value(&trial);
            (trial, val)
        };
        let (eta, val) = {
            let mut line = |eta: f64| at_eta(eta).1;
            golden_section(&mut line, 0.0, 4.0, 32)
        };
        if val < current - 1e-15 {
            let (trial, val) = at_eta(eta);
            *atoms = trial;
            current = val;
        } else {
            break;
        }
    }
    current
}

/// Nelder-Mead refinement of each atom's angles, holding the others fixed.
fn refine_atoms(problem: &ReeProblem, atoms: &mut [ProductAtom], iters: usize) -> f64 {
    let (d0, d1) = problem.dims;
    let d = d0 * d1;
    let nx = n_state_angles(d0);
    let ny = n_state_angles(d1);
    let mut current = f64::INFINITY;
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    for k in 0..atoms.len() {
        // atoms carrying no weight cannot move the objective
        if atoms[k].weight / total < 1e-7 {
            continue;
        }
        // everything except atom k stays fixed during its refinement
        let mut rest = ComplexMatrix::zeros(d, d);
        for (i, a) in atoms.iter().enumerate() {
            if i == k {
                continue;
            }
            let p = a.matrix(problem.dims);
            let w = Complex64::new(a.weight / total * (1.0 - SIGMA_FLOOR), 0.0);
            for r in 0..d {
                for c in 0..d {
                    rest[(r, c)] += p[(r, c)] * w;
                }
            }
        }
        for i in 0..d {
            rest[(i, i)] += Complex64::new(SIGMA_FLOOR / d as f64, 0.0);
        }
        let wk = atoms[k].weight / total * (1.0 - SIGMA_FLOOR);
        let x0: Vec<f64> = crate::optim::angles_from_pure_state(&atoms[k].x)
            .into_iter()
            .chain(crate::optim::angles_from_pure_state(&atoms[k].y))
            .collect();
        let mut objective = |angles: &[f64]| -> f64 {
            let atom = ProductAtom {
                x: pure_state_from_angles(d0, &angles[..nx]),
                y: pure_state_from_angles(d1, &angles[nx..nx + ny]),
                weight: wk,
            };
            let p = atom.matrix(problem.dims);
            let mut m = rest.clone();
            for r in 0..d {
                for c in 0..d {
                    m[(r, c)] += p[(r, c)] * Complex64::new(wk, 0.0);
                }
            }
            let (w, v) = hermitian_eig(&m.symmetrized()).expect("Hermitian");
            problem.value_from_eig(&w, &v)
        };
        let r = nelder_mead(&mut objective, &x0, 0.15, iters, 1e-9);
        atoms[k].x = pure_state_from_angles(d0, &r.x[..nx]);
        atoms[k].y = pure_state_from_angles(d1, &r.x[nx..nx + ny]);
        current = r.value;
    }
    current
}

struct FwOutcome {
    value: f64,
    atoms: Vec<ProductAtom>,
    gap: f64,
    iterations: usize,
}

/// Atom-insertion descent with away steps: toward-steps mix in the best
/// product direction, away-steps shift weight off the worst-held atom; both
/// use an exact line search. Away steps avoid the slow tail of plain
/// toward-only iterations when the optimum lies in the interior.
fn fw_minimize(
    problem: &ReeProblem,
    mut atoms: Vec<ProductAtom>,
    budget: &ReeBudget,
) -> FwOutcome {
    renormalize(&mut atoms);
    let mut value = reweight(problem, &mut atoms, 30);
    let mut history: Vec<f64> = vec![value];
    let mut gap = f64::INFINITY;
    let mut iterations = 0usize;
    for t in 0..budget.max_iters {
        iterations = t + 1;
        let sigma = problem.sigma_matrix(&atoms);
        let (w, v) = hermitian_eig(&sigma).expect("Hermitian");
        value = problem.value_from_eig(&w, &v);
        let l = problem.descent_matrix(&w, &v);
        let (x, y, atom_val) = best_product_vector(&l, problem.dims);
        let tr_sigma_l = sigma.mul(&l).trace().re;
        gap = (atom_val - tr_sigma_l).max(0.0);
        // the linear gap bounds the remaining suboptimality
        if gap < budget.gap_tol {
            break;
        }

        // away candidate: currently held atom with the smallest descent
        // expectation
        let scores: Vec<f64> = atoms
            .iter()
            .map(|a| a.expectation(&l, problem.dims))
            .collect();
        let (away_idx, away_score) = scores
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, &s)| (i, s))
            .unwrap();
        let gap_away = tr_sigma_l - away_score;

        let toward = gap >= gap_away;
        let dir_mat = if toward {
            ProductAtom {
                x: x.clone(),
                y: y.clone(),
                weight: 1.0,
            }
            .matrix(problem.dims)
        } else {
            atoms[away_idx].matrix(problem.dims)
        };
        // toward: sigma + g(P - sigma), g in [0, 1]
        // away:   sigma + g(sigma - P_a), g in [0, w_a/(1 - w_a)]
        let g_max = if toward {
            1.0
        } else {
            let wa = atoms[away_idx].weight;
            if wa >= 1.0 - 1e-12 {
                0.0
            } else {
                wa / (1.0 - wa)
            }
        };
        let sign = if toward { 1.0 } else { -1.0 };
        let base = sigma.clone();
        let mut line = |g: f64| -> f64 {
            let d = base.rows();
            let mut m = base.scaled_re(1.0 - sign * g);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += dir_mat[(i, j)] * Complex64::new(sign * g, 0.0);
                }
            }
            let (w, v) = hermitian_eig(&m.symmetrized()).expect("Hermitian");
            problem.value_from_eig(&w, &v)
        };
        if g_max > 1e-14 {
            let (g, lv) = golden_section(&mut line, 0.0, g_max, 32);
            if lv < value - 1e-15 && g > 1e-14 {
                if toward {
                    for a in atoms.iter_mut() {
                        a.weight *= 1.0 - g;
                    }
                    atoms.push(ProductAtom { x, y, weight: g });
                } else {
                    for a in atoms.iter_mut() {
                        a.weight *= 1.0 + g;
                    }
                    atoms[away_idx].weight -= g;
                }
                value = lv;
            }
        }
        atoms.retain(|a| a.weight > 1e-14);
        // keep the witness within the term budget
        while atoms.len() > budget.terms {
            let (idx, _) = atoms
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.weight.partial_cmp(&b.1.weight).unwrap())
                .unwrap();
            atoms.remove(idx);
            renormalize(&mut atoms);
        }
        if t % 8 == 7 {
            value = reweight(problem, &mut atoms, 25);
        }
        if t % 40 == 39 {
            refine_atoms(problem, &mut atoms, 40);
            value = reweight(problem, &mut atoms, 25);
        }
        history.push(value);
        if history.len() > budget.window {
            let then = history[history.len() - 1 - budget.window];
            if then - value < budget.rel_tol * value.abs().max(1.0) {
                break;
            }
        }
    }
    value = alternate_polish(problem, &mut atoms, 2);
    FwOutcome {
        value,
        atoms,
        gap,
        iterations,
    }
}

/// Alternates per-atom angle refinement with simplex re-weighting until the
/// improvement stalls or the round budget runs out.
fn alternate_polish(problem: &ReeProblem, atoms: &mut Vec<ProductAtom>, rounds: usize) -> f64 {
    let mut value = reweight(problem, atoms, 60);
    for _ in 0..rounds {
        refine_atoms(problem, atoms, 40);
        let next = reweight(problem, atoms, 40);
        let improved = value - next;
        value = next;
        if improved < (1e-8 * value.abs()).max(1e-12) {
            break;
        }
    }
    value
}

/// Boundary-line finisher: walks from the state toward the incumbent
/// witness (pulled slightly inside the separable set) until the partial
/// transpose turns positive, then minimizes the relative entropy along the
/// certified-separable tail of the segment. Near the separable boundary
/// this lands orders of magnitude below what atom insertion reaches in the
/// same time; separability of the returned state is PPT-certified, which is
/// sufficient at the supported dimensions.
fn boundary_line_witness(
    rho: &DensityMatrix,
    problem: &ReeProblem,
    fw_atoms: &[ProductAtom],
) -> Option<(f64, ComplexMatrix)> {
    let sig = rho.sig().clone();
    let label1 = sig.label(1).to_string();
    // pull the line target a little inside the separable set: the converged
    // witness can sit exactly on the PPT boundary
    let d = problem.rho.rows();
    let mut target = problem.sigma_matrix(fw_atoms).scaled_re(1.0 - 3e-4);
    for i in 0..d {
        target[(i, i)] += Complex64::new(3e-4 / d as f64, 0.0);
    }
    let mix = |s: f64| -> ComplexMatrix {
        problem
            .rho
            .scaled_re(1.0 - s)
            .add(&target.scaled_re(s))
            .symmetrized()
    };
    let margin = 1e-9;
    let min_eig = |s: f64| -> f64 {
        let dm = DensityMatrix::new_unchecked(mix(s), sig.clone());
        is_ppt(&dm, &label1).map(|v| v.min_eigenvalue).unwrap_or(-1.0)
    };
    if min_eig(1.0) < margin {
        return None;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if min_eig(mid) >= margin {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let value_at = |s: f64| -> f64 {
        let (w, v) = hermitian_eig(&mix(s)).expect("Hermitian");
        problem.value_from_eig(&w, &v)
    };
    let mut line = |s: f64| value_at(s);
    let (mut s_best, mut val) = golden_section(&mut line, hi, 1.0, 50);
    if min_eig(s_best) < -1e-10 {
        // fall back to the certified crossing point
        s_best = hi;
        val = value_at(hi);
    }
    Some((val, mix(s_best)))
}

/// Upper bound on the relative entropy of entanglement over an explicit
/// separable witness. For PPT states of the supported signatures the value
/// 0 is returned exactly (the PPT test certifies separability there and the
/// state witnesses itself).
pub fn ree_estimate(rho: &DensityMatrix, budget: &ReeBudget) -> Result<ReeEstimate> {
    if rho.sig().len() != 2 {
        return Err(Error::NotBipartite {
            subsystems: rho.sig().len(),
        });
    }
    let mut sorted = rho.sig().dims().to_vec();
    sorted.sort_unstable();
    if !(sorted == [2, 2] || sorted == [2, 3]) {
        return Err(Error::UnsupportedSignature {
            what: "ree_estimate",
            detail: format!("dims {:?}", rho.sig().dims()),
        });
    }
    let label1 = rho.sig().label(1).to_string();
    let ppt = is_ppt(rho, &label1)?;
    if ppt.ppt {
        return Ok(ReeEstimate {
            value: 0.0,
            witness: rho.clone(),
            ppt_certified: true,
            fw_gap: 0.0,
            iterations: 0,
        });
    }

    let eigs = rho.eigenvalues();
    let rho_reg = if eigs[0] < 1e-9 {
        rho.mixed_with_identity(1e-9)
    } else {
        rho.clone()
    };
    let tr_rho_log_rho: f64 = rho_reg
        .eigenvalues()
        .iter()
        .filter(|&&x| x > 1e-300)
        .map(|&x| x * x.log2())
        .sum();
    let dims = (rho.sig().dims()[0], rho.sig().dims()[1]);
    let problem = ReeProblem {
        rho: rho_reg.matrix().clone(),
        dims,
        tr_rho_log_rho,
    };

    let pinch_budget = Budget {
        starts: 4,
        iters: 90,
        seed: budget.seed,
        simplex_tol: 1e-9,
    };
    let mut best: Option<FwOutcome> = None;
    for restart in 0..budget.restarts.max(1) {
        let side = restart % 2;
        let mut atoms = pinch_atoms(&problem.rho, dims, 1 - side, &pinch_budget);
        if atoms.is_empty() {
            atoms = pinch_atoms(&problem.rho, dims, side, &pinch_budget);
        }
        let mut rng = ChaCha12Rng::seed_from_u64(
            budget.seed ^ (restart as u64).wrapping_mul(0xD1B5_4A32_D192_ED03),
        );
        for _ in 0..4 {
            atoms.push(random_atom(dims, &mut rng));
        }
        let outcome = fw_minimize(&problem, atoms, budget);
        if best.as_ref().is_none_or(|b| outcome.value < b.value) {
            best = Some(outcome);
        }
    }
    let mut best = best.expect("at least one restart");
    // the boundary-line finisher dominates near the separable boundary; the
    // deep alternating polish handles the interior, with its adaptive exit
    // keeping converged cases cheap
    let mut line = boundary_line_witness(rho, &problem, &best.atoms);
    let line_wins = line.as_ref().is_some_and(|(lv, _)| *lv < best.value * 0.5);
    if !line_wins {
        // in the small-value (near-boundary) regime the line point is the
        // workhorse; cap the polish there instead of letting it crawl
        let rounds = if best.value < 1e-2 && line.is_some() { 6 } else { 60 };
        let polished = alternate_polish(&problem, &mut best.atoms, rounds);
        best.value = polished.min(best.value);
        line = boundary_line_witness(rho, &problem, &best.atoms);
    }
    let (value, witness_mat) = match line {
        Some((lv, lm)) if lv < best.value => (lv, lm),
        _ => (best.value, problem.sigma_matrix(&best.atoms)),
    };
    let witness = DensityMatrix::new_unchecked(witness_mat, rho.sig().clone());
    if !value.is_finite() {
        return Err(Error::SupportViolation);
    }
    Ok(ReeEstimate {
        value: value.max(0.0),
        witness,
        ppt_certified: false,
        fw_gap: best.gap,
        iterations: best.iterations,
    })
}

// ---------------------------------------------------------------------------
// Irreversibility reports
// ---------------------------------------------------------------------------

/// Classification used by the strict-gap statement: the gap claim applies
/// to mixed entangled states that are neither pure nor pseudo-pure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StateClass {
    Pure,
    PseudoPure,
    Separable,
    MixedEntangled,
}

/// Outcome of the strict EOF > coherent-information check.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Verdict {
    pub class: StateClass,
    pub eof: f64,
    pub coherent_information: f64,
    /// `eof - coherent_information`; strictly positive for mixed entangled
    /// non-pseudo-pure states.
    pub gap: f64,
}

/// Classifies a two-qubit state and evaluates the EOF vs coherent
/// information gap. Pseudo-pure detection goes through the structural
/// zero-discord test on the purification's complementary marginals.
pub fn lemma1_check(rho: &DensityMatrix) -> Result<Lemma1Verdict> {
    require_two_qubits(rho)?;
    let labels: Vec<String> = rho.sig().labels().iter().map(|s| s.to_string()).collect();
    let (a, b) = (labels[0].as_str(), labels[1].as_str());
    let eof = eof_2q(rho)?;
    let ic = crate::entropy::coherent_information(rho, a, b)?;
    let eigs = rho.eigenvalues();
    let class = if eigs[eigs.len() - 1] >= 1.0 - 1e-9 {
        StateClass::Pure
    } else if is_ppt(rho, b)?.ppt {
        StateClass::Separable
    } else {
        let psi = purify(rho);
        let c = psi.sig().label(2).to_string();
        let rho_ac = psi.reduced(&[a, &c])?;
        let rho_bc = psi.reduced(&[b, &c])?;
        let pp = zero_discord_check(&rho_ac, &c)?.zero_discord
            || zero_discord_check(&rho_bc, &c)?.zero_discord;
        if pp {
            StateClass::PseudoPure
        } else {
            StateClass::MixedEntangled
        }
    };
    Ok(Lemma1Verdict {
        class,
        eof,
        coherent_information: ic,
        gap: eof - ic,
    })
}

/// Budgets for the theorem-level reports.
#[derive(Debug, Clone, Copy)]
pub struct ReportBudget {
    pub discord: Budget,
    pub ree: ReeBudget,
    pub oracle: Budget,
    /// Attach the numerical REE cross-check (can dominate runtime on
    /// sweeps).
    pub with_ree_numeric: bool,
}

impl Default for ReportBudget {
    fn default() -> Self {
        Self {
            discord: Budget::default(),
            ree: ReeBudget::default(),
            oracle: Budget::oracle_default(),
            with_ree_numeric: true,
        }
    }
}

/// Input selector for [`theorem2_report`].
pub enum Theorem2Input<'a> {
    Example(ExampleFamilyParams),
    Spec(&'a OneMcSpec),
}

/// Exact measure chain for a 1-MC state, with numerical cross-checks.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Report {
    /// True when the PPT test certifies the complementary state separable
    /// (2x2 / 2x3); without it no exactness is claimed.
    pub hypothesis_certified: bool,
    pub rho_ac_ppt: PptVerdict,
    pub degenerate_a_states: bool,
    pub s_cond_ab: f64,
    pub coherent_information: f64,
    pub concurrence: Option<f64>,
    pub eof: f64,
    pub eof_is_exact: bool,
    pub e_distillable: BoundValue,
    pub e_cost: BoundValue,
    pub delta_loss: BoundValue,
    /// Single-copy relative entropy of entanglement. Only bounds are
    /// claimed: the regularized value pins the lower end, the EOF (and the
    /// numerical witness when computed) the upper end. For tilted 1-MC
    /// states the single-copy value genuinely exceeds the lower bound.
    pub ree: BoundValue,
    /// Regularized relative entropy of entanglement; squeezed to
    /// `-S(a|b)` exactly when the hypothesis is certified.
    pub ree_regularized: BoundValue,
    pub key_rate: BoundValue,
    pub discord_ab: DiscordResult,
    pub discord_deviation: Option<f64>,
    pub ree_numeric: Option<f64>,
    pub ree_deviation: Option<f64>,
}

/// Builds the irreversibility report for a 1-MC state: the distillable
/// entanglement, discord, relative entropy of entanglement and key rate all
/// equal `-S(a|b)` when the complementary state is certified separable, and
/// the entanglement cost equals the (additive) EOF.
pub fn theorem2_report(input: Theorem2Input<'_>, budget: &ReportBudget) -> Result<Theorem2Report> {
    let (psi, rho_ab, degenerate) = match input {
        Theorem2Input::Example(params) => {
            let (psi, rho_ab, _) = example_family(&params);
            (psi, rho_ab, params.theta() == 0.0)
        }
        Theorem2Input::Spec(spec) => {
            let (psi, rho_ab) = make_one_mc(spec)?;
            (psi, rho_ab, spec.degenerate_a_states())
        }
    };
    let labels = psi.sig().labels();
    let (a, b, c) = (labels[0], labels[1], labels[2]);
    let rho_ac = psi.reduced(&[a, c])?;
    let rho_ac_ppt = is_ppt(&rho_ac, c)?;
    let certified = rho_ac_ppt.ppt && rho_ac_ppt.certifies_separability;

    let s_cond_ab = conditional_entropy(&rho_ab, a, b)?;
    let e_d_exact = -s_cond_ab;
    let ic = crate::entropy::coherent_information(&rho_ab, a, b)?;

    let two_qubit = rho_ab.sig().dims() == [2, 2];
    let (concurrence, eof, eof_is_exact) = if two_qubit {
        let cc = concurrence_2q(&rho_ab)?;
        (Some(cc), eof_2q(&rho_ab)?, true)
    } else {
        let r = rho_ab.rank();
        let m = (2 * r).min(r * r).max(r);
        let (val, _) = eof_ensemble_oracle(&rho_ab, &[a], m, &budget.oracle)?;
        (None, val, false)
    };

    let (e_distillable, e_cost, key_rate) = if certified {
        let ed = BoundValue::exact(e_d_exact, Provenance::ExactByTheorem);
        let ec = if eof_is_exact {
            BoundValue::exact(eof, Provenance::ExactByAdditivity)
        } else {
            BoundValue {
                lower: e_d_exact,
                upper: eof,
                provenance: Provenance::ExactByAdditivity,
            }
        };
        (ed, ec, ed)
    } else {
        (
            BoundValue::bounds(ic, eof),
            BoundValue::bounds(ic, eof),
            BoundValue::bounds(ic, eof),
        )
    };
    let delta_loss = if certified && eof_is_exact {
        BoundValue::exact((eof - e_d_exact).max(0.0), Provenance::ExactByTheorem)
    } else {
        BoundValue::bounds(
            (e_cost.lower - e_distillable.upper).max(0.0),
            (e_cost.upper - e_distillable.lower).max(0.0),
        )
    };

    let discord_ab = discord(&rho_ab, a, b, &budget.discord)?;
    let discord_deviation = certified.then(|| (discord_ab.discord - e_d_exact).abs());

    let mut sorted = rho_ab.sig().dims().to_vec();
    sorted.sort_unstable();
    let ree_numeric = if budget.with_ree_numeric && (sorted == [2, 2] || sorted == [2, 3]) {
        Some(ree_estimate(&rho_ab, &budget.ree)?.value)
    } else {
        None
    };
    let ree_deviation = match (certified, ree_numeric) {
        (true, Some(v)) => Some((v - e_d_exact).abs()),
        _ => None,
    };
    let (ree, ree_regularized) = if certified {
        // regularized REE is squeezed to -S(a|b); the single-copy value is
        // only bracketed (it exceeds the lower bound off the theta = pi/2
        // axis)
        let upper = ree_numeric.map_or(eof, |v| v.min(eof));
        (
            BoundValue::bounds(e_d_exact, upper.max(e_d_exact)),
            BoundValue::exact(e_d_exact, Provenance::ExactByTheorem),
        )
    } else {
        (
            BoundValue::bounds(ic, ree_numeric.map_or(eof, |v| v.min(eof))),
            BoundValue::bounds(ic, eof),
        )
    };

    Ok(Theorem2Report {
        hypothesis_certified: certified,
        rho_ac_ppt,
        degenerate_a_states: degenerate,
        s_cond_ab,
        coherent_information: ic,
        concurrence,
        eof,
        eof_is_exact,
        e_distillable,
        e_cost,
        delta_loss,
        ree,
        ree_regularized,
        key_rate,
        discord_ab,
        discord_deviation,
        ree_numeric,
        ree_deviation,
    })
}

/// Verdict of the single-copy irreversibility certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IrrVerdict {
    /// Mixed entangled with a separability-certified complementary
    /// marginal: irreversible.
    IrreversibleByTheorem2,
    /// Pure states build and distill reversibly.
    PureReversible,
    /// No certificate applies; reversibility is never claimed.
    NoCertificate,
}

/// Which single-copy certificates hold for a two-qubit state.
#[derive(Debug, Clone, Serialize)]
pub struct IrreversibilityConditions {
    pub class: StateClass,
    /// Label pair of the purification marginal certified separable, when
    /// one exists ("first" / "second" subsystem with the purifier).
    pub additivity_route: Option<String>,
    pub rho_ac_ppt: Option<PptVerdict>,
    pub rho_bc_ppt: Option<PptVerdict>,
    pub coherent_information: f64,
    /// Whether hashing already distills at a single copy (I_C > 0).
    pub hashing_positive: bool,
    pub verdict: IrrVerdict,
}

/// Reports the Theorem-2-style certificates establishable at a single copy:
/// EOF additivity via a PPT-separable purification marginal, and the
/// coherent-information note. Never claims reversibility for mixed states.
pub fn irreversibility_conditions(rho: &DensityMatrix) -> Result<IrreversibilityConditions> {
    require_two_qubits(rho)?;
    let verdict = lemma1_check(rho)?;
    let labels: Vec<String> = rho.sig().labels().iter().map(|s| s.to_string()).collect();
    let (a, b) = (labels[0].as_str(), labels[1].as_str());
    let ic = verdict.coherent_information;
    if verdict.class == StateClass::Pure {
        return Ok(IrreversibilityConditions {
            class: verdict.class,
            additivity_route: None,
            rho_ac_ppt: None,
            rho_bc_ppt: None,
            coherent_information: ic,
            hashing_positive: ic > 1e-12,
            verdict: IrrVerdict::PureReversible,
        });
    }
    let psi = purify(rho);
    let c = psi.sig().label(2).to_string();
    let rho_ac = psi.reduced(&[a, &c])?;
    let rho_bc = psi.reduced(&[b, &c])?;
    let v_ac = is_ppt(&rho_ac, &c)?;
    let v_bc = is_ppt(&rho_bc, &c)?;
    let route = if v_ac.ppt && v_ac.certifies_separability {
        Some(format!("{a}{c}"))
    } else if v_bc.ppt && v_bc.certifies_separability {
        Some(format!("{b}{c}"))
    } else {
        None
    };
    let verdict_kind = if verdict.class == StateClass::MixedEntangled && route.is_some() {
        IrrVerdict::IrreversibleByTheorem2
    } else {
        IrrVerdict::NoCertificate
    };
    Ok(IrreversibilityConditions {
        class: verdict.class,
        additivity_route: route,
        rho_ac_ppt: Some(v_ac),
        rho_bc_ppt: Some(v_bc),
        coherent_information: ic,
        hashing_positive: ic > 1e-12,
        verdict: verdict_kind,
    })
}

/// Full measure report for a two-qubit state: closed forms where they
/// exist, bound intervals elsewhere.
#[derive(Debug, Clone, Serialize)]
pub struct EntanglementReport {
    pub concurrence: f64,
    pub eof: f64,
    pub coherent_information: f64,
    pub separable: bool,
    pub e_cost: BoundValue,
    pub e_distillable: BoundValue,
    pub delta_loss: BoundValue,
    pub ree_lower: f64,
    pub ree_upper: f64,
    pub key_rate: BoundValue,
}

impl EntanglementReport {
    pub fn compute(rho: &DensityMatrix, ree_budget: &ReeBudget) -> Result<Self> {
        require_two_qubits(rho)?;
        let labels = rho.sig().labels();
        let (a, b) = (labels[0], labels[1]);
        let concurrence = concurrence_2q(rho)?;
        let eof = eof_2q(rho)?;
        let ic = crate::entropy::coherent_information(rho, a, b)?;
        let ppt = is_ppt(rho, b)?;
        if ppt.ppt {
            // separability certified at 2x2: every measure vanishes
            let zero = BoundValue::exact(0.0, Provenance::ExactByTheorem);
            return Ok(Self {
                concurrence,
                eof,
                coherent_information: ic,
                separable: true,
                e_cost: zero,
                e_distillable: zero,
                delta_loss: zero,
                ree_lower: 0.0,
                ree_upper: 0.0,
                key_rate: zero,
            });
        }
        let ree = ree_estimate(rho, ree_budget)?;
        let ree_lower = ic.max(0.0);
        let ree_upper = ree.value;
        Ok(Self {
            concurrence,
            eof,
            coherent_information: ic,
            separable: false,
            e_cost: BoundValue::bounds(ree_lower.max(ic), eof),
            e_distillable: BoundValue::bounds(ic, ree_upper),
            delta_loss: BoundValue::bounds((ic - ree_upper).max(0.0), eof - ic),
            ree_lower,
            ree_upper,
            key_rate: BoundValue::bounds(ic, ree_upper),
        })
    }

    /// Bound-level restatement of the measure ordering
    /// EOF >= cost >= regularized REE >= key >= distillable >= coherent
    /// information: every violation beyond `slack` is reported.
    pub fn check_chain(&self, slack: f64) -> std::result::Result<(), String> {
        let mut problems = Vec::new();
        if self.eof + slack < self.ree_upper {
            problems.push(format!(
                "eof {} < ree_upper {}",
                self.eof, self.ree_upper
            ));
        }
        if self.ree_upper + slack < self.ree_lower {
            problems.push(format!(
                "ree_upper {} < ree_lower {}",
                self.ree_upper, self.ree_lower
            ));
        }
        if self.e_distillable.lower > self.ree_upper + slack {
            problems.push(format!(
                "e_distillable.lower {} > ree_upper {}",
                self.e_distillable.lower, self.ree_upper
            ));
        }
        for (name, bv) in [
            ("e_cost", &self.e_cost),
            ("e_distillable", &self.e_distillable),
            ("delta_loss", &self.delta_loss),
            ("key_rate", &self.key_rate),
        ] {
            if bv.lower > bv.upper + slack {
                problems.push(format!("{name} bounds inverted: {} > {}", bv.lower, bv.upper));
            }
        }
        if self.e_cost.upper > self.eof + slack {
            problems.push(format!(
                "e_cost.upper {} > eof {}",
                self.e_cost.upper, self.eof
            ));
        }
        if self.e_cost.is_exact() && self.e_distillable.is_exact() {
            let delta = self.e_cost.value() - self.e_distillable.value();
            if (self.delta_loss.value() - delta).abs() > slack {
                problems.push("delta_loss inconsistent with cost - distillable".to_string());
            }
        }
        if self.e_distillable.is_exact() && self.e_distillable.value() > self.ree_upper + 1e-3 {
            problems.push("exact e_distillable exceeds ree_upper beyond 1e-3".to_string());
        }
        if self.coherent_information > self.e_distillable.upper + slack && !self.separable {
            problems.push("coherent information exceeds distillable upper bound".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems.join("; "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::von_neumann_entropy;
    use crate::linalg::DimSignature;
    use crate::states::{bell_state, make_pseudo_pure, random_density_matrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;
    const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;

    fn werner(p: f64) -> DensityMatrix {
        let bell = bell_state().density();
        let mut m = bell.matrix().scaled_re(p);
        for i in 0..4 {
            m[(i, i)] += Complex64::new((1.0 - p) / 4.0, 0.0);
        }
        DensityMatrix::new(m, bell.sig().clone()).unwrap()
    }

    #[test]
    fn concurrence_known_values() {
        assert!((concurrence_2q(&bell_state().density()).unwrap() - 1.0).abs() < 1e-10);
        // product state
        let sig = DimSignature::new(&[2, 2], &["a", "b"]).unwrap();
        let prod = DensityMatrix::new(
            crate::linalg::tensor_product(
                &ComplexMatrix::from_diag(&[0.7, 0.3]),
                &ComplexMatrix::from_diag(&[0.4, 0.6]),
            ),
            sig,
        )
        .unwrap();
        assert!(concurrence_2q(&prod).unwrap() < 1e-10);
        // sigma_ab at theta = pi/2: C = cos(phi)
        for phi in [0.2f64, 0.7, 1.3] {
            let (_, sigma, _) =
                example_family(&ExampleFamilyParams::new(FRAC_PI_2, phi).unwrap());
            assert!(
                (concurrence_2q(&sigma).unwrap() - phi.cos()).abs() < 1e-10,
                "phi = {phi}"
            );
        }
        // Werner at p: C = (3p-1)/2
        let cw = concurrence_2q(&werner(0.9)).unwrap();
        assert!((cw - 0.85).abs() < 1e-10);
    }

    #[test]
    fn eof_known_values() {
        assert!((eof_2q(&bell_state().density()).unwrap() - 1.0).abs() < 1e-10);
        assert!(eof_2q(&werner(0.2)).unwrap() < 1e-12);
        let (_, sigma, _) =
            example_family(&ExampleFamilyParams::new(FRAC_PI_2, FRAC_PI_4).unwrap());
        assert!((eof_2q(&sigma).unwrap() - 0.600876).abs() < 1e-6);
    }

    #[test]
    fn oracle_matches_closed_form_on_samples() {
        let sig = DimSignature::new(&[2, 2], &["a", "b"]).unwrap();
        let budget = Budget::oracle_default();
        for seed in 0..6u64 {
            let rho = random_density_matrix(&sig, 4, 1000 + seed).unwrap();
            let closed = eof_2q(&rho).unwrap();
            let (val, dec) = eof_ensemble_oracle(&rho, &["a"], 4, &budget).unwrap();
            assert!(
                val - closed <= 1e-5 && val - closed >= -1e-7,
                "seed {seed}: oracle {val} vs closed {closed}"
            );
            assert!(dec.reconstruction_error(&rho) < 1e-9);
        }
    }

    #[test]
    fn oracle_on_pure_state_gives_marginal_entropy() {
        let (_, sigma, _) = example_family(&ExampleFamilyParams::new(0.9, 0.0).unwrap());
        // phi = 0: pure
        let budget = Budget::oracle_default();
        let (val, _) = eof_ensemble_oracle(&sigma, &["a"], 1, &budget).unwrap();
        let expected = von_neumann_entropy(&sigma.partial_trace(&["a"]).unwrap());
        assert!((val - expected).abs() < 1e-9);
    }

    #[test]
    fn oracle_on_pseudo_pure_recovers_flag_decomposition() {
        // two Bell-type members with different entanglement
        let phi = bell_state();
        let theta = 0.5f64;
        let partial = PureState::new(
            vec![
                c(theta.cos(), 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(theta.sin(), 0.0),
            ],
            DimSignature::new(&[2, 2], &["a", "b"]).unwrap(),
        )
        .unwrap();
        let pp = make_pseudo_pure(&[(0.4, phi.clone()), (0.6, partial.clone())], 2).unwrap();
        let e1 = 1.0;
        let e2 = {
            let r = partial.reduced(&["a"]).unwrap();
            von_neumann_entropy(&r)
        };
        let expected = 0.4 * e1 + 0.6 * e2;
        let budget = Budget::oracle_default();
        let (val, _) = eof_ensemble_oracle(&pp, &["a"], 4, &budget).unwrap();
        assert!(
            (val - expected).abs() < 1e-6,
            "oracle {val} vs flag decomposition {expected}"
        );
    }

    #[test]
    fn oracle_rejects_bad_ensemble_sizes() {
        let sig = DimSignature::new(&[2, 2], &["a", "b"]).unwrap();
        let rho = random_density_matrix(&sig, 4, 3).unwrap();
        assert!(matches!(
            eof_ensemble_oracle(&rho, &["a"], 3, &Budget::oracle_default()),
            Err(Error::EnsembleSizeOutOfRange { .. })
        ));
        assert!(matches!(
            eof_ensemble_oracle(&rho, &["a"], 17, &Budget::oracle_default()),
            Err(Error::EnsembleSizeOutOfRange { .. })
        ));
    }

    #[test]
    fn koashi_winter_decoupled_c() {
        let psi = bell_state()
            .tensor(
                &PureState::new(
                    vec![c(1.0, 0.0), c(0.0, 0.0)],
                    DimSignature::new(&[2], &["c"]).unwrap(),
                )
                .unwrap(),
            )
            .unwrap();
        let val = eof_via_koashi_winter(&psi, &Budget::default()).unwrap();
        assert!((val - 1.0).abs() < 1e-6);
    }

    #[test]
    fn koashi_winter_matches_wootters_on_example() {
        let (psi, sigma, _) =
            example_family(&ExampleFamilyParams::new(FRAC_PI_2, FRAC_PI_4).unwrap());
        let kw = eof_via_koashi_winter(&psi, &Budget::default()).unwrap();
        let closed = eof_2q(&sigma).unwrap();
        assert!((kw - closed).abs() < 1e-5, "kw {kw} vs closed {closed}");
        assert!(kw >= closed - 1e-9);
    }

    #[test]
    fn ree_zero_for_ppt_states() {
        let est = ree_estimate(&werner(0.25), &ReeBudget::default()).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.ppt_certified);
    }

    #[test]
    fn ree_bell_state_is_one() {
        let est = ree_estimate(&bell_state().density(), &ReeBudget::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-3, "ree {}", est.value);
        // witness is separable by construction: PPT check
        let ppt = is_ppt(&est.witness, "b").unwrap();
        assert!(ppt.ppt);
    }

    #[test]
    fn ree_exact_on_known_families() {
        // Bell-diagonal (Werner): R = 1 - h(largest eigenvalue)
        let known = 1.0 - binary_entropy(0.925).unwrap();
        let est = ree_estimate(&werner(0.9), &ReeBudget::default()).unwrap();
        assert!((est.value - known).abs() < 1e-6, "werner ree {}", est.value);

        // pure states: R equals the entanglement entropy
        let (_, sigma, _) = example_family(&ExampleFamilyParams::new(0.9, 0.0).unwrap());
        let known = binary_entropy((1.0 + 0.9f64.cos()) / 2.0).unwrap();
        let est = ree_estimate(&sigma, &ReeBudget::default()).unwrap();
        assert!((est.value - known).abs() < 1e-6, "pure ree {}", est.value);

        // maximally correlated axis (theta = pi/2): R = -S(a|b)
        let (_, sigma, _) =
            example_family(&ExampleFamilyParams::new(FRAC_PI_2, FRAC_PI_4).unwrap());
        let target = -conditional_entropy(&sigma, "a", "b").unwrap();
        let est = ree_estimate(&sigma, &ReeBudget::default()).unwrap();
        assert!((est.value - target).abs() < 1e-6, "mc ree {}", est.value);
    }

    #[test]
    fn ree_on_tilted_family_stays_within_certified_bracket() {
        // off the theta = pi/2 axis the single-copy value exceeds -S(a|b),
        // which remains a certified lower bound through the regularized
        // value; the EOF caps it from above
        let (_, sigma, _) = example_family(&ExampleFamilyParams::new(0.9, 0.9).unwrap());
        let lower = -conditional_entropy(&sigma, "a", "b").unwrap();
        let upper = eof_2q(&sigma).unwrap();
        let est = ree_estimate(&sigma, &ReeBudget::default()).unwrap();
        assert!(est.value >= lower - 1e-7, "ree {} below lower {lower}", est.value);
        assert!(est.value <= upper + 1e-9, "ree {} above eof {upper}", est.value);
        // the witness stays separable
        assert!(is_ppt(&est.witness, "b").unwrap().ppt);
        // reproducible to high precision across runs
        let est2 = ree_estimate(&sigma, &ReeBudget::default()).unwrap();
        assert_eq!(est.value.to_bits(), est2.value.to_bits());
    }

    #[test]
    fn lemma1_classification_and_gap() {
        let bell = bell_state().density();
        let v = lemma1_check(&bell).unwrap();
        assert_eq!(v.class, StateClass::Pure);
        assert!((v.eof - 1.0).abs() < 1e-9 && (v.coherent_information - 1.0).abs() < 1e-9);

        let v = lemma1_check(&werner(0.2)).unwrap();
        assert_eq!(v.class, StateClass::Separable);
        assert!(v.eof < 1e-9 && v.coherent_information < 1e-9);

        let v = lemma1_check(&werner(0.9)).unwrap();
        assert_eq!(v.class, StateClass::MixedEntangled);
        assert!(v.gap > 1e-6, "gap {}", v.gap);

        // a rank-2 Bell-diagonal mixture is mixed entangled, not pseudo-pure:
        // its purification marginals are quantum on the purifier side (the
        // conditional states overlap), so the structural test rejects them
        let m = {
            let b1 = bell_state().density();
            let amps = [
                c(0.5f64.sqrt(), 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-(0.5f64.sqrt()), 0.0),
            ];
            let mut m2 = ComplexMatrix::zeros(4, 4);
            for i in 0..4 {
                for j in 0..4 {
                    m2[(i, j)] = amps[i] * amps[j].conj();
                }
            }
            let mut m3 = b1.matrix().scaled_re(0.6);
            for i in 0..4 {
                for j in 0..4 {
                    m3[(i, j)] += m2[(i, j)] * Complex64::new(0.4, 0.0);
                }
            }
            DensityMatrix::new(m3, b1.sig().clone()).unwrap()
        };
        let v = lemma1_check(&m).unwrap();
        assert_eq!(v.class, StateClass::MixedEntangled);
        assert!(v.gap > 1e-6);
    }

    #[test]
    fn theorem2_report_example_values() {
        let budget = ReportBudget::default();
        let rep = theorem2_report(
            Theorem2Input::Example(ExampleFamilyParams::new(FRAC_PI_2, FRAC_PI_4).unwrap()),
            &budget,
        )
        .unwrap();
        assert!(rep.hypothesis_certified);
        assert!((rep.e_distillable.value() - 0.399124).abs() < 1e-6);
        assert!((rep.e_cost.value() - 0.600876).abs() < 1e-6);
        assert!((rep.delta_loss.value() - 0.201752).abs() < 1e-6);
        assert_eq!(rep.ree_regularized.value(), rep.e_distillable.value());
        assert_eq!(rep.key_rate.value(), rep.e_distillable.value());
        assert!(rep.ree.lower <= rep.ree.upper);
        assert!((rep.ree.lower - rep.e_distillable.value()).abs() < 1e-12);
        assert!(rep.discord_deviation.unwrap() < 1e-5);
        // on the theta = pi/2 axis the single-copy value coincides
        assert!(rep.ree_deviation.unwrap() < 1e-3);
        assert!(!rep.degenerate_a_states);
    }

    #[test]
    fn theorem2_report_pure_and_separable_edges() {
        let budget = ReportBudget {
            with_ree_numeric: false,
            ..ReportBudget::default()
        };
        // phi = 0: pure, delta = 0, cost = distillable = h((1+cos theta)/2)
        let theta = 0.8f64;
        let rep = theorem2_report(
            Theorem2Input::Example(ExampleFamilyParams::new(theta, 0.0).unwrap()),
            &budget,
        )
        .unwrap();
        let expect = binary_entropy((1.0 + theta.cos()) / 2.0).unwrap();
        assert!((rep.e_cost.value() - expect).abs() < 1e-9);
        assert!((rep.e_distillable.value() - expect).abs() < 1e-9);
        assert!(rep.delta_loss.value().abs() < 1e-9);

        // phi = pi/2: separable, all measures 0
        let rep = theorem2_report(
            Theorem2Input::Example(ExampleFamilyParams::new(theta, FRAC_PI_2).unwrap()),
            &budget,
        )
        .unwrap();
        assert!(rep.e_cost.value().abs() < 1e-9);
        assert!(rep.e_distillable.value().abs() < 1e-9);
        assert!(rep.delta_loss.value().abs() < 1e-9);
    }

    #[test]
    fn irreversibility_verdicts() {
        // example family mixed region: irreversible by the theorem
        let (_, sigma, _) = example_family(&ExampleFamilyParams::new(0.9, 0.6).unwrap());
        let cond = irreversibility_conditions(&sigma).unwrap();
        assert_eq!(cond.verdict, IrrVerdict::IrreversibleByTheorem2);
        assert!(cond.additivity_route.is_some());

        // Bell state: pure-reversible note
        let cond = irreversibility_conditions(&bell_state().density()).unwrap();
        assert_eq!(cond.verdict, IrrVerdict::PureReversible);

        // generic full-rank entangled state: no certificate (rank 4 purifier
        // makes the marginals 2x4, outside the certifiable PPT range)
        let sig = DimSignature::new(&[2, 2], &["a", "b"]).unwrap();
        let mut found = false;
        for seed in 0..40 {
            let rho = random_density_matrix(&sig, 4, 500 + seed).unwrap();
            if !is_ppt(&rho, "b").unwrap().ppt {
                let cond = irreversibility_conditions(&rho).unwrap();
                assert_eq!(cond.verdict, IrrVerdict::NoCertificate);
                found = true;
                break;
            }
        }
        assert!(found, "no entangled draw found");
    }

    #[test]
    fn entanglement_report_chain_holds() {
        let budget = ReeBudget::default();
        for seed in [2u64, 5, 9] {
            let sig = DimSignature::new(&[2, 2], &["a", "b"]).unwrap();
            let rho = random_density_matrix(&sig, 4, 900 + seed).unwrap();
            let rep = EntanglementReport::compute(&rho, &budget).unwrap();
            rep.check_chain(1e-9).unwrap();
        }
        let rep = EntanglementReport::compute(&werner(0.95), &budget).unwrap();
        rep.check_chain(1e-9).unwrap();
        assert!(!rep.separable);
        assert!(rep.ree_upper <= rep.eof + 1e-9);
    }
}
