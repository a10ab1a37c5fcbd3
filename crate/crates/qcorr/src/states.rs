//! State constructors and canonical decompositions.
//!
//! Covers the state families the rest of the crate measures: the Bell pair,
//! pseudo-pure mixtures with orthogonal flags, one-way maximally correlated
//! (1-MC) states, the two-angle example family, purification and Schmidt
//! decomposition, and seeded random states drawn from the unitarily
//! invariant measure.

use num_complex::Complex64;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::linalg::{hermitian_eig, partial_trace, partial_transpose, ComplexMatrix, DimSignature};
use crate::{Error, Result};

/// Eigenvalue cutoff below which a direction does not count toward the rank.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Normalized state vector with a subsystem signature.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
    sig: DimSignature,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>, sig: DimSignature) -> Result<Self> {
        sig.check_side(amps.len())?;
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps, sig })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn sig(&self) -> &DimSignature {
        &self.sig
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Projector |psi><psi| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let n = self.dim();
        let mat = ComplexMatrix::from_fn(n, n, |i, j| self.amps[i] * self.amps[j].conj());
        DensityMatrix {
            mat,
            sig: self.sig.clone(),
        }
    }

    /// Reduced state on the kept labels.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityMatrix> {
        self.density().partial_trace(keep)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        for l in other.sig.labels() {
            if self.sig.labels().contains(&l) {
                return Err(Error::DuplicateLabel {
                    label: l.to_string(),
                });
            }
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let dims: Vec<usize> = self
            .sig
            .dims()
            .iter()
            .chain(other.sig.dims())
            .copied()
            .collect();
        let labels: Vec<&str> = self
            .sig
            .labels()
            .into_iter()
            .chain(other.sig.labels())
            .collect();
        PureState::new(amps, DimSignature::new(&dims, &labels)?)
    }
}

/// Positive unit-trace Hermitian operator with a subsystem signature.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    sig: DimSignature,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12, then symmetrizes), unit trace (1e-10)
    /// and positivity (eigenvalues >= -1e-10).
    pub fn new(mat: ComplexMatrix, sig: DimSignature) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.rows(),
                cols: mat.cols(),
            });
        }
        sig.check_side(mat.rows())?;
        let dev = mat.hermiticity_defect();
        if dev > 1e-12 {
            return Err(Error::NotHermitian { max_dev: dev });
        }
        let mat = mat.symmetrized();
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::TraceNotOne { trace });
        }
        let (w, _) = hermitian_eig(&mat)?;
        if w[0] < -1e-10 {
            return Err(Error::NotPositive {
                min_eigenvalue: w[0],
            });
        }
        Ok(Self { mat, sig })
    }

    /// Trusted constructor for matrices produced by operations that preserve
    /// the invariants (partial traces of valid states, convex mixtures, ...).
    pub(crate) fn new_unchecked(mat: ComplexMatrix, sig: DimSignature) -> Self {
        debug_assert!(mat.hermiticity_defect() <= 1e-10);
        debug_assert!((mat.trace().re - 1.0).abs() <= 1e-9);
        Self {
            mat: mat.symmetrized(),
            sig,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn sig(&self) -> &DimSignature {
        &self.sig
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let (mat, sig) = partial_trace(&self.mat, &self.sig, keep)?;
        Ok(DensityMatrix::new_unchecked(mat, sig))
    }

    /// Partial transpose; the result is Hermitian but in general not PSD, so
    /// it is returned as a bare matrix.
    pub fn partial_transpose(&self, subsystem: &str) -> Result<ComplexMatrix> {
        partial_transpose(&self.mat, &self.sig, subsystem)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.mat)
            .expect("density matrix is Hermitian")
            .0
    }

    pub fn purity(&self) -> f64 {
        self.mat.mul(&self.mat).trace().re
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues()
            .iter()
            .filter(|&&w| w > RANK_CUTOFF)
            .count()
    }

    /// Convex mixture `(1-eps) rho + eps I/d`, useful as a regularizer.
    pub fn mixed_with_identity(&self, eps: f64) -> DensityMatrix {
        let d = self.dim();
        let mut mat = self.mat.scaled_re(1.0 - eps);
        for i in 0..d {
            mat[(i, i)] += Complex64::new(eps / d as f64, 0.0);
        }
        DensityMatrix::new_unchecked(mat, self.sig.clone())
    }
}

/// |Phi> = (|00> + |11>)/sqrt(2) on qubits `a`, `b`.
pub fn bell_state() -> PureState {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let amps = vec![
        Complex64::new(r, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(r, 0.0),
    ];
    PureState::new(amps, DimSignature::new(&[2, 2], &["a", "b"]).unwrap()).unwrap()
}

/// Pseudo-pure mixture: each pure state is tagged by a computational-basis
/// flag on an appended subsystem, making the members locally distinguishable.
///
/// The output is block-diagonal in the flag index by construction.
pub fn make_pseudo_pure(pairs: &[(f64, PureState)], flag_dim: usize) -> Result<DensityMatrix> {
    if pairs.is_empty() {
        return Err(Error::InvalidProbabilities { sum: 0.0 });
    }
    if flag_dim < pairs.len() {
        return Err(Error::FlagDimTooSmall {
            flag_dim,
            pairs: pairs.len(),
        });
    }
    let sum: f64 = pairs.iter().map(|(p, _)| p).sum();
    if pairs.iter().any(|&(p, _)| p <= 0.0) || (sum - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidProbabilities { sum });
    }
    let base_sig = pairs[0].1.sig().clone();
    for (_, psi) in pairs {
        if psi.sig() != &base_sig {
            return Err(Error::UnsupportedSignature {
                what: "make_pseudo_pure",
                detail: "all pure states must share one signature".to_string(),
            });
        }
    }
    let d = base_sig.total_dim();
    let sig = base_sig.extended(flag_dim);
    let n = d * flag_dim;
    let mut mat = ComplexMatrix::zeros(n, n);
    for (k, (p, psi)) in pairs.iter().enumerate() {
        let amps = psi.amplitudes();
        for i in 0..d {
            for j in 0..d {
                mat[(i * flag_dim + k, j * flag_dim + k)] +=
                    amps[i] * amps[j].conj() * Complex64::new(*p, 0.0);
            }
        }
    }
    DensityMatrix::new(mat, sig)
}

/// Specification of a one-way maximally correlated state
/// `sum_i alpha_i |a_i, i_b, c_i>`.
#[derive(Debug, Clone)]
pub struct OneMcSpec {
    alphas: Vec<Complex64>,
    a_states: Vec<Vec<Complex64>>,
    c_states: Vec<Vec<Complex64>>,
}

impl OneMcSpec {
    pub fn new(
        alphas: Vec<Complex64>,
        a_states: Vec<Vec<Complex64>>,
        c_states: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let n = alphas.len();
        if n == 0 || a_states.len() != n || c_states.len() != n {
            return Err(Error::DimMismatch {
                expected: n,
                got: a_states.len().max(c_states.len()),
            });
        }
        let da = a_states[0].len();
        let dc = c_states[0].len();
        for v in &a_states {
            if v.len() != da {
                return Err(Error::DimMismatch {
                    expected: da,
                    got: v.len(),
                });
            }
            check_unit(v)?;
        }
        for v in &c_states {
            if v.len() != dc {
                return Err(Error::DimMismatch {
                    expected: dc,
                    got: v.len(),
                });
            }
            check_unit(v)?;
        }
        let weight: f64 = alphas.iter().map(|z| z.norm_sqr()).sum();
        if (weight - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized {
                norm: weight.sqrt(),
            });
        }
        Ok(Self {
            alphas,
            a_states,
            c_states,
        })
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn a_states(&self) -> &[Vec<Complex64>] {
        &self.a_states
    }

    pub fn c_states(&self) -> &[Vec<Complex64>] {
        &self.c_states
    }

    /// True when two `|a_i>` coincide up to phase; such specs are accepted
    /// but reports carry the flag.
    pub fn degenerate_a_states(&self) -> bool {
        for i in 0..self.n() {
            for j in (i + 1)..self.n() {
                let ov: Complex64 = self.a_states[i]
                    .iter()
                    .zip(self.a_states[j].iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                if (ov.norm() - 1.0).abs() < 1e-10 {
                    return true;
                }
            }
        }
        false
    }
}

fn check_unit(v: &[Complex64]) -> Result<()> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Builds the tripartite purification and the 1-MC marginal
/// `rho_ab = sum_ij beta_ij |a_i i_b><a_j j_b|` with
/// `beta_ij = alpha_i alpha_j* <c_j|c_i>`.
pub fn make_one_mc(spec: &OneMcSpec) -> Result<(PureState, DensityMatrix)> {
    let n = spec.n();
    let da = spec.a_states[0].len();
    let dc = spec.c_states[0].len();
    let sig_abc = DimSignature::new(&[da, n, dc], &["a", "b", "c"])?;
    let mut amps = vec![Complex64::new(0.0, 0.0); da * n * dc];
    for i in 0..n {
        for x in 0..da {
            for y in 0..dc {
                amps[(x * n + i) * dc + y] +=
                    spec.alphas[i] * spec.a_states[i][x] * spec.c_states[i][y];
            }
        }
    }
    let psi = PureState::new(amps, sig_abc)?;

    let sig_ab = DimSignature::new(&[da, n], &["a", "b"])?;
    let mut mat = ComplexMatrix::zeros(da * n, da * n);
    for i in 0..n {
        for j in 0..n {
            let cjci: Complex64 = spec.c_states[j]
                .iter()
                .zip(spec.c_states[i].iter())
                .map(|(cj, ci)| cj.conj() * ci)
                .sum();
            let beta = spec.alphas[i] * spec.alphas[j].conj() * cjci;
            for x in 0..da {
                for y in 0..da {
                    mat[(x * n + i, y * n + j)] +=
                        beta * spec.a_states[i][x] * spec.a_states[j][y].conj();
                }
            }
        }
    }
    let rho_ab = DensityMatrix::new(mat, sig_ab)?;
    Ok((psi, rho_ab))
}

/// Angles of the example family, both in [0, pi/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleFamilyParams {
    theta: f64,
    phi: f64,
}

impl ExampleFamilyParams {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        let hi = std::f64::consts::FRAC_PI_2;
        for (what, v) in [("theta", theta), ("phi", phi)] {
            if !(0.0..=hi).contains(&v) {
                return Err(Error::OutOfRange {
                    what,
                    value: v,
                    lo: 0.0,
                    hi,
                });
            }
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// `|psi_abc> = (|000> + |theta 1 phi>)/sqrt2` and its two-sided marginals.
///
/// Returns `(psi_abc, sigma_ab, rho_ac)`; `rho_ac` is an explicit mixture of
/// two product states, so the complementary state is separable for every
/// parameter choice.
pub fn example_family(params: &ExampleFamilyParams) -> (PureState, DensityMatrix, DensityMatrix) {
    let spec = OneMcSpec::new(
        vec![
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ],
        vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![
                Complex64::new(params.theta.cos(), 0.0),
                Complex64::new(params.theta.sin(), 0.0),
            ],
        ],
        vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![
                Complex64::new(params.phi.cos(), 0.0),
                Complex64::new(params.phi.sin(), 0.0),
            ],
        ],
    )
    .expect("example family spec is always valid");
    let (psi, sigma_ab) = make_one_mc(&spec).expect("example family construction");
    let rho_ac = psi.reduced(&["a", "c"]).expect("labels exist");
    (psi, sigma_ab, rho_ac)
}

/// Purifies `rho` on an appended subsystem of dimension `rank(rho)`.
pub fn purify(rho: &DensityMatrix) -> PureState {
    let (w, v) = hermitian_eig(rho.matrix()).expect("density matrix is Hermitian");
    let kept: Vec<usize> = (0..w.len()).filter(|&k| w[k] > RANK_CUTOFF).collect();
    let rank = kept.len().max(1);
    let d = rho.dim();
    let sig = rho.sig().extended(rank);
    let mut amps = vec![Complex64::new(0.0, 0.0); d * rank];
    for (slot, &k) in kept.iter().enumerate() {
        let c = w[k].max(0.0).sqrt();
        for x in 0..d {
            amps[x * rank + slot] += v[(x, k)] * c;
        }
    }
    // renormalize: discarded sub-cutoff weight is at most d * RANK_CUTOFF
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut amps {
        *z /= norm;
    }
    PureState::new(amps, sig).expect("purification is normalized")
}

/// Schmidt decomposition across `left` | rest.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<Vec<Complex64>>,
    pub right_vectors: Vec<Vec<Complex64>>,
    pub left_sig: DimSignature,
    pub right_sig: DimSignature,
}

/// Decomposes `psi = sum_k c_k |l_k>|r_k>` with real non-negative
/// coefficients in non-increasing order; phases are absorbed into the right
/// vectors.
pub fn schmidt_decompose(psi: &PureState, left: &[&str]) -> Result<SchmidtDecomposition> {
    let sig = psi.sig();
    if left.is_empty() {
        return Err(Error::TrivialBipartition);
    }
    let left_pos = sig.positions(left)?;
    if left_pos.len() == sig.len() {
        return Err(Error::TrivialBipartition);
    }
    let right_pos: Vec<usize> = (0..sig.len()).filter(|p| !left_pos.contains(p)).collect();
    let left_sig = sig.subset(&left_pos);
    let right_sig = sig.subset(&right_pos);
    let dl = left_sig.total_dim();
    let dr = right_sig.total_dim();

    // permute amplitudes into an l x r matrix
    let full_strides = {
        let mut st = vec![1usize; sig.len()];
        for i in (0..sig.len().saturating_sub(1)).rev() {
            st[i] = st[i + 1] * sig.dims()[i + 1];
        }
        st
    };
    let decompose = |mut combined: usize, dims: &[usize]| -> Vec<usize> {
        let mut digits = vec![0usize; dims.len()];
        for k in (0..dims.len()).rev() {
            digits[k] = combined % dims[k];
            combined /= dims[k];
        }
        digits
    };
    let mut m = ComplexMatrix::zeros(dl, dr);
    for li in 0..dl {
        let ld = decompose(li, left_sig.dims());
        let mut base = 0usize;
        for (k, &p) in left_pos.iter().enumerate() {
            base += ld[k] * full_strides[p];
        }
        for ri in 0..dr {
            let rd = decompose(ri, right_sig.dims());
            let mut idx = base;
            for (k, &p) in right_pos.iter().enumerate() {
                idx += rd[k] * full_strides[p];
            }
            m[(li, ri)] = psi.amplitudes()[idx];
        }
    }

    // left reduced state M M'; its eigenvectors are the left Schmidt vectors
    let rho_l = m.mul(&m.dagger());
    let (w, v) = hermitian_eig(&rho_l)?;
    let mut coefficients = Vec::new();
    let mut left_vectors = Vec::new();
    let mut right_vectors = Vec::new();
    for k in (0..w.len()).rev() {
        if w[k] <= RANK_CUTOFF {
            break;
        }
        let c = w[k].sqrt();
        let l: Vec<Complex64> = v.column(k);
        // r~ = l' M has norm c; the right vector absorbs the phase
        let mut r = vec![Complex64::new(0.0, 0.0); dr];
        for (j, rj) in r.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..dl {
                acc += l[i].conj() * m[(i, j)];
            }
            *rj = acc / c;
        }
        coefficients.push(c);
        left_vectors.push(l);
        right_vectors.push(r);
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_vectors,
        right_vectors,
        left_sig,
        right_sig,
    })
}

/// Stream of standard complex Gaussians from a seeded generator.
struct GaussianStream {
    rng: ChaCha12Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    fn uniform(&mut self) -> f64 {
        // 53-bit mantissa in [0, 1)
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // Box-Muller; u1 in (0, 1]
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * t.sin());
        r * t.cos()
    }

    fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }
}

/// Uniform (Haar-induced) random pure state: normalized standard complex
/// Gaussian vector. Deterministic for a fixed seed.
pub fn random_pure_state(sig: &DimSignature, seed: u64) -> PureState {
    let mut g = GaussianStream::new(seed);
    let mut amps: Vec<Complex64> = (0..sig.total_dim()).map(|_| g.complex_normal()).collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut amps {
        *z /= norm;
    }
    PureState::new(amps, sig.clone()).expect("normalized by construction")
}

/// Random density matrix of the given rank: partial trace of a random pure
/// state on `sig (x) rank`. Deterministic for a fixed seed.
pub fn random_density_matrix(sig: &DimSignature, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let d = sig.total_dim();
    if rank == 0 || rank > d {
        return Err(Error::RankOutOfRange { rank, max: d });
    }
    let ext = sig.extended(rank);
    let psi = random_pure_state(&ext, seed);
    let keep = sig.labels();
    psi.reduced(&keep)
}

/// PPT verdict: for 2x2 and 2x3 signatures a positive partial transpose
/// certifies separability; for larger signatures it is only a PPT statement.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PptVerdict {
    pub ppt: bool,
    pub min_eigenvalue: f64,
    pub certifies_separability: bool,
}

/// Peres-Horodecki test on a bipartite state.
pub fn is_ppt(rho: &DensityMatrix, subsystem: &str) -> Result<PptVerdict> {
    if rho.sig().len() != 2 {
        return Err(Error::NotBipartite {
            subsystems: rho.sig().len(),
        });
    }
    let pt = rho.partial_transpose(subsystem)?;
    let (w, _) = hermitian_eig(&pt)?;
    let mut dims = rho.sig().dims().to_vec();
    dims.sort_unstable();
    Ok(PptVerdict {
        ppt: w[0] >= -1e-10,
        min_eigenvalue: w[0],
        certifies_separability: dims == [2, 2] || dims == [2, 3],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;
    const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;

    #[test]
    fn bell_is_the_unit_of_entanglement() {
        let phi = bell_state();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((phi.amplitudes()[0].re - r).abs() < 1e-15);
        assert!(phi.amplitudes()[1].norm() < 1e-15);
        assert!(phi.amplitudes()[2].norm() < 1e-15);
        assert!((phi.amplitudes()[3].re - r).abs() < 1e-15);
        assert!((phi.inner(&phi).re - 1.0).abs() < 1e-14);
        for side in ["a", "b"] {
            let red = phi.reduced(&[side]).unwrap();
            assert!(
                red.matrix()
                    .max_abs_diff(&ComplexMatrix::identity(2).scaled_re(0.5))
                    < 1e-14
            );
        }
    }

    #[test]
    fn pseudo_pure_single_pair_and_block_structure() {
        let phi = bell_state();
        let pp = make_pseudo_pure(&[(1.0, phi.clone())], 1).unwrap();
        let direct = phi.density();
        // flag dim 1: same matrix, extra trivial subsystem
        assert!(pp.matrix().max_abs_diff(direct.matrix()) < 1e-14);

        let psi2 = PureState::new(
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            DimSignature::new(&[2, 2], &["a", "b"]).unwrap(),
        )
        .unwrap();
        let pp = make_pseudo_pure(&[(0.5, phi), (0.5, psi2)], 2).unwrap();
        assert_eq!(pp.sig().dims(), &[2, 2, 2]);
        assert_eq!(pp.rank(), 2);
        // dephasing in the flag basis leaves the matrix untouched (exact
        // zeros off the flag diagonal)
        let m = pp.matrix();
        for i in 0..8 {
            for j in 0..8 {
                if i % 2 != j % 2 {
                    assert_eq!(m[(i, j)], c(0.0, 0.0));
                }
            }
        }
        // invalid probability vectors are rejected
        let err = make_pseudo_pure(&[(0.7, bell_state())], 1);
        assert!(matches!(err, Err(Error::InvalidProbabilities { .. })));
        let err = make_pseudo_pure(&[(0.5, bell_state()), (0.5, bell_state())], 1);
        assert!(matches!(err, Err(Error::FlagDimTooSmall { .. })));
    }

    #[test]
    fn one_mc_construction_matches_partial_trace() {
        let spec = OneMcSpec::new(
            vec![c(0.6, 0.0), c(0.0, 0.8)],
            vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.6, 0.0), c(0.8, 0.0)],
            ],
            vec![
                vec![c(0.0, 1.0), c(0.0, 0.0)],
                vec![c(0.28, 0.0), c(0.0, 0.96)],
            ],
        )
        .unwrap();
        let (psi, rho_ab) = make_one_mc(&spec).unwrap();
        let traced = psi.reduced(&["a", "b"]).unwrap();
        assert!(rho_ab.matrix().max_abs_diff(traced.matrix()) < 1e-12);
        // measuring b in the distinguished basis leaves a in |a_i> exactly:
        // the conditional block for outcome i is proportional to |a_i><a_i|
        let m = rho_ab.matrix();
        let n = 2;
        for i in 0..n {
            let p: f64 = (0..2).map(|x| m[(x * n + i, x * n + i)].re).sum();
            assert!(p > 0.0);
            for x in 0..2 {
                for y in 0..2 {
                    let block = m[(x * n + i, y * n + i)] / p;
                    let expect = spec.a_states()[i][x] * spec.a_states()[i][y].conj();
                    assert!((block - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn one_mc_special_cases() {
        // identical c states decouple c: rho_ab pure
        let spec = OneMcSpec::new(
            vec![c(0.6, 0.0), c(0.8, 0.0)],
            vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
            ],
            vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(1.0, 0.0), c(0.0, 0.0)],
            ],
        )
        .unwrap();
        let (_, rho) = make_one_mc(&spec).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);

        // orthogonal c states, basis a states: classical-classical diagonal
        let spec = OneMcSpec::new(
            vec![c(0.6, 0.0), c(0.8, 0.0)],
            vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
            ],
            vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
            ],
        )
        .unwrap();
        let (_, rho) = make_one_mc(&spec).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(rho.matrix()[(i, j)].norm() < 1e-14);
                }
            }
        }
        assert!(!spec.degenerate_a_states());
    }

    #[test]
    fn example_family_matches_one_mc_form() {
        // sigma_ab = 1/2 [ |00><00| + |t1><t1| + cos(phi)(|00><t1| + h.c.) ]
        let theta = 0.9f64;
        let phi = 0.4f64;
        let (_, sigma, rho_ac) = example_family(&ExampleFamilyParams::new(theta, phi).unwrap());
        let e1 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let e2 = [
            c(0.0, 0.0),
            c(theta.cos(), 0.0),
            c(0.0, 0.0),
            c(theta.sin(), 0.0),
        ];
        let expect = ComplexMatrix::from_fn(4, 4, |i, j| {
            0.5 * (e1[i] * e1[j].conj()
                + e2[i] * e2[j].conj()
                + phi.cos() * (e1[i] * e2[j].conj() + e2[i] * e1[j].conj()))
        });
        assert!(sigma.matrix().max_abs_diff(&expect) < 1e-12);

        // rho_ac = (|00><00| + |theta phi><theta phi|)/2
        let tp = |x: f64, k: usize| if k == 0 { x.cos() } else { x.sin() };
        let expect_ac = ComplexMatrix::from_fn(4, 4, |i, j| {
            let (ia, ic) = (i / 2, i % 2);
            let (ja, jc) = (j / 2, j % 2);
            let term1 = if i == 0 && j == 0 { 1.0 } else { 0.0 };
            let term2 = tp(theta, ia) * tp(phi, ic) * tp(theta, ja) * tp(phi, jc);
            c(0.5 * (term1 + term2), 0.0)
        });
        assert!(rho_ac.matrix().max_abs_diff(&expect_ac) < 1e-12);
    }

    #[test]
    fn example_family_edge_cases() {
        // theta = pi/2, phi = 0: sigma_ab is the Bell projector
        let (_, sigma, _) = example_family(&ExampleFamilyParams::new(FRAC_PI_2, 0.0).unwrap());
        assert!(sigma.matrix().max_abs_diff(bell_state().density().matrix()) < 1e-12);

        // phi = pi/2: separable
        let (_, sigma, _) = example_family(&ExampleFamilyParams::new(1.1, FRAC_PI_2).unwrap());
        let v = is_ppt(&sigma, "b").unwrap();
        assert!(v.ppt && v.certifies_separability);

        // theta = pi/2, phi = pi/4: eigenvalues (1 +/- sqrt2/2)/2 and zeros
        let (_, sigma, _) = example_family(&ExampleFamilyParams::new(FRAC_PI_2, FRAC_PI_4).unwrap());
        let w = sigma.eigenvalues();
        let r = std::f64::consts::SQRT_2 / 2.0;
        assert!(w[0].abs() < 1e-12 && w[1].abs() < 1e-12);
        assert!((w[2] - (1.0 - r) / 2.0).abs() < 1e-12);
        assert!((w[3] - (1.0 + r) / 2.0).abs() < 1e-12);

        assert!(ExampleFamilyParams::new(-0.1, 0.0).is_err());
        assert!(ExampleFamilyParams::new(0.0, 2.0).is_err());
    }

    #[test]
    fn purify_basics() {
        // pure state: appended dimension 1
        let rho = bell_state().density();
        let psi = purify(&rho);
        assert_eq!(psi.sig().dims(), &[2, 2, 1]);

        // maximally mixed qubit purifies to a Bell-type state
        let sig = DimSignature::new(&[2], &["a"]).unwrap();
        let mm = DensityMatrix::new(ComplexMatrix::identity(2).scaled_re(0.5), sig).unwrap();
        let psi = purify(&mm);
        assert_eq!(psi.sig().dims(), &[2, 2]);
        let back = psi.reduced(&["a"]).unwrap();
        assert!(back.matrix().max_abs_diff(mm.matrix()) < 1e-12);
        // ancilla side also maximally mixed
        let anc = psi.reduced(&[psi.sig().label(1)]).unwrap();
        assert!(
            anc.matrix()
                .max_abs_diff(&ComplexMatrix::identity(2).scaled_re(0.5))
                < 1e-12
        );
    }

    #[test]
    fn schmidt_bell_and_product() {
        let sd = schmidt_decompose(&bell_state(), &["a"]).unwrap();
        assert_eq!(sd.coefficients.len(), 2);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sd.coefficients[0] - r).abs() < 1e-12);
        assert!((sd.coefficients[1] - r).abs() < 1e-12);

        // product state: single coefficient 1
        let sig = DimSignature::new(&[2, 2], &["a", "b"]).unwrap();
        let prod = PureState::new(
            vec![c(0.6, 0.0), c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            sig,
        )
        .unwrap();
        let sd = schmidt_decompose(&prod, &["a"]).unwrap();
        assert_eq!(sd.coefficients.len(), 1);
        assert!((sd.coefficients[0] - 1.0).abs() < 1e-12);

        // trivial bipartitions are rejected
        assert!(schmidt_decompose(&bell_state(), &[]).is_err());
        assert!(schmidt_decompose(&bell_state(), &["a", "b"]).is_err());
    }

    #[test]
    fn schmidt_example_family_ab_c() {
        let (psi, sigma, _) =
            example_family(&ExampleFamilyParams::new(FRAC_PI_2, FRAC_PI_4).unwrap());
        let sd = schmidt_decompose(&psi, &["a", "b"]).unwrap();
        let sq: Vec<f64> = sd.coefficients.iter().map(|x| x * x).collect();
        let w = sigma.eigenvalues();
        assert!((sq[0] - w[3]).abs() < 1e-10);
        assert!((sq[1] - w[2]).abs() < 1e-10);
        assert!((sq[0] - 0.85355).abs() < 1e-5);
        assert!((sq[1] - 0.14645).abs() < 1e-5);
        // reconstruction
        let mut rec = [c(0.0, 0.0); 8];
        for k in 0..sd.coefficients.len() {
            for (li, l) in sd.left_vectors[k].iter().enumerate() {
                for (ri, r) in sd.right_vectors[k].iter().enumerate() {
                    rec[li * 2 + ri] += sd.coefficients[k] * l * r;
                }
            }
        }
        let dev: f64 = rec
            .iter()
            .zip(psi.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10);
    }

    #[test]
    fn random_states_are_deterministic_and_valid() {
        let sig = DimSignature::new(&[2, 2], &["a", "b"]).unwrap();
        let psi1 = random_pure_state(&sig, 42);
        let psi2 = random_pure_state(&sig, 42);
        assert_eq!(psi1.amplitudes(), psi2.amplitudes());
        let psi3 = random_pure_state(&sig, 43);
        assert_ne!(psi1.amplitudes(), psi3.amplitudes());

        let rho1 = random_density_matrix(&sig, 4, 7).unwrap();
        let rho2 = random_density_matrix(&sig, 4, 7).unwrap();
        assert_eq!(rho1.matrix().data(), rho2.matrix().data());

        // rank 1 output is pure
        let rho = random_density_matrix(&sig, 1, 5).unwrap();
        let w = rho.eigenvalues();
        assert!((w[3] - 1.0).abs() < 1e-10);

        assert!(random_density_matrix(&sig, 5, 1).is_err());
        assert!(random_density_matrix(&sig, 0, 1).is_err());
    }

    #[test]
    fn ppt_verdicts() {
        let bell = bell_state().density();
        let v = is_ppt(&bell, "b").unwrap();
        assert!(!v.ppt);
        assert!((v.min_eigenvalue + 0.5).abs() < 1e-12);
        assert!(v.certifies_separability);

        // any product state is PPT
        let sig = DimSignature::new(&[2, 2], &["a", "b"]).unwrap();
        let prod = DensityMatrix::new(
            crate::linalg::tensor_product(
                &ComplexMatrix::from_diag(&[0.3, 0.7]),
                &ComplexMatrix::from_diag(&[0.9, 0.1]),
            ),
            sig,
        )
        .unwrap();
        assert!(is_ppt(&prod, "a").unwrap().ppt);

        // rho_ac of the example family is separable on the full 33x33 grid
        for i in 0..33 {
            for j in 0..33 {
                let p = ExampleFamilyParams::new(
                    FRAC_PI_2 * i as f64 / 32.0,
                    FRAC_PI_2 * j as f64 / 32.0,
                )
                .unwrap();
                let (_, _, rho_ac) = example_family(&p);
                assert!(is_ppt(&rho_ac, "c").unwrap().ppt);
            }
        }

        // non-bipartite signatures are rejected
        let sig3 = DimSignature::new(&[2, 2, 2], &["a", "b", "c"]).unwrap();
        let psi = random_pure_state(&sig3, 1);
        assert!(matches!(
            is_ppt(&psi.density(), "a"),
            Err(Error::NotBipartite { .. })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let sig = DimSignature::new(&[2], &["a"]).unwrap();
        // negative eigenvalue
        let bad = ComplexMatrix::from_diag(&[1.1, -0.1]);
        assert!(matches!(
            DensityMatrix::new(bad, sig.clone()),
            Err(Error::NotPositive { .. })
        ));
        // wrong trace
        let bad = ComplexMatrix::from_diag(&[0.6, 0.6]);
        assert!(matches!(
            DensityMatrix::new(bad, sig.clone()),
            Err(Error::TraceNotOne { .. })
        ));
        // non-Hermitian
        let mut bad = ComplexMatrix::from_diag(&[0.5, 0.5]);
        bad[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            DensityMatrix::new(bad, sig),
            Err(Error::NotHermitian { .. })
        ));
    }
}
