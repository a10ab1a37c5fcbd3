//! Entropic functionals, all in bits.
//!
//! Eigenvalues in [-1e-10, 1e-12] are treated as exact zeros before the
//! entropy sum so that eigensolver noise cannot produce NaNs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::{Error, Result};

/// h(p) = -p log2 p - (1-p) log2 (1-p), with 0 log 0 := 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(Error::OutOfRange {
            what: "probability",
            value: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let p = p.clamp(0.0, 1.0);
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    Ok(h)
}

/// Entropy of a probability-like eigenvalue list.
pub fn entropy_of_eigenvalues(eigs: &[f64]) -> f64 {
    let s: f64 = eigs
        .iter()
        .filter(|&&w| w > 1e-12)
        .map(|&w| -w * w.log2())
        .sum();
    s + 0.0 // normalizes -0.0 from exact rank-1 spectra
}

/// Entropy of a Hermitian PSD matrix; hot path used by the optimizers.
pub(crate) fn entropy_of_matrix(m: &ComplexMatrix) -> f64 {
    let (w, _) = hermitian_eig(m).expect("entropy input must be Hermitian");
    entropy_of_eigenvalues(&w)
}

/// S(rho) = -sum w_i log2 w_i; non-negative, at most log2(dim).
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_eigenvalues(&rho.eigenvalues())
}

/// S(target|given) = S(rho_{target,given}) - S(rho_given). May be negative.
pub fn conditional_entropy(rho: &DensityMatrix, target: &str, given: &str) -> Result<f64> {
    let joint = rho.partial_trace(&[target, given])?;
    let marg = rho.partial_trace(&[given])?;
    Ok(von_neumann_entropy(&joint) - von_neumann_entropy(&marg))
}

/// I(x;y) = S(x) + S(y) - S(xy).
pub fn mutual_information(rho: &DensityMatrix, x: &str, y: &str) -> Result<f64> {
    if x == y {
        return Err(Error::DuplicateLabel {
            label: x.to_string(),
        });
    }
    let joint = rho.partial_trace(&[x, y])?;
    let mx = rho.partial_trace(&[x])?;
    let my = rho.partial_trace(&[y])?;
    Ok(von_neumann_entropy(&mx) + von_neumann_entropy(&my) - von_neumann_entropy(&joint))
}

/// I_C = max{0, -S(a|b), -S(b|a)}; the hashing lower bound on distillable
/// entanglement.
pub fn coherent_information(rho: &DensityMatrix, a: &str, b: &str) -> Result<f64> {
    if a == b {
        return Err(Error::DuplicateLabel {
            label: a.to_string(),
        });
    }
    let sab = conditional_entropy(rho, a, b)?;
    let sba = conditional_entropy(rho, b, a)?;
    Ok((-sab).max(-sba).max(0.0))
}

/// Entropies of a bipartite state, all in bits.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub s_joint: f64,
    pub s_marginals: BTreeMap<String, f64>,
    /// Keyed `"x|y"` for S(x|y).
    pub s_conditional: BTreeMap<String, f64>,
    pub mutual_information: f64,
    pub coherent_information: f64,
}

impl EntropyReport {
    /// Report over the ordered pair `(a, b)`; extra subsystems are traced
    /// out first.
    pub fn compute_pair(rho: &DensityMatrix, a: &str, b: &str) -> Result<Self> {
        let joint = rho.partial_trace(&[a, b])?;
        let s_joint = von_neumann_entropy(&joint);
        let sa = von_neumann_entropy(&joint.partial_trace(&[a])?);
        let sb = von_neumann_entropy(&joint.partial_trace(&[b])?);
        let mut s_marginals = BTreeMap::new();
        s_marginals.insert(a.to_string(), sa);
        s_marginals.insert(b.to_string(), sb);
        let mut s_conditional = BTreeMap::new();
        s_conditional.insert(format!("{a}|{b}"), s_joint - sb);
        s_conditional.insert(format!("{b}|{a}"), s_joint - sa);
        Ok(Self {
            s_joint,
            s_marginals,
            s_conditional,
            mutual_information: sa + sb - s_joint,
            coherent_information: (sb - s_joint).max(sa - s_joint).max(0.0),
        })
    }

    /// Report for a two-subsystem state.
    pub fn compute(rho: &DensityMatrix) -> Result<Self> {
        if rho.sig().len() != 2 {
            return Err(Error::NotBipartite {
                subsystems: rho.sig().len(),
            });
        }
        let labels = rho.sig().labels();
        Self::compute_pair(rho, labels[0], labels[1])
    }
}
