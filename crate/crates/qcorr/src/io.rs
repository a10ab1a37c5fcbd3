//! JSON state-file schema shared with the CLI.
//!
//! Density matrices: `{"dims": [..], "labels": [..], "re": [[..]], "im":
//! [[..]]}` with row-major nested arrays. Pure states use flat `re` / `im`
//! arrays. Amplitudes follow the global row-major label order. Numbers
//! round-trip bitwise through serde_json's shortest-representation floats.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{ComplexMatrix, DimSignature};
use crate::states::{DensityMatrix, OneMcSpec, PureState};
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct DensityMatrixJson {
    dims: Vec<usize>,
    labels: Vec<String>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PureStateJson {
    dims: Vec<usize>,
    labels: Vec<String>,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// A parsed state file: either kind is accepted wherever a density matrix
/// is needed (pure states densify).
#[derive(Debug, Clone)]
pub enum StateDocument {
    Density(DensityMatrix),
    Pure(PureState),
}

impl StateDocument {
    pub fn into_density(self) -> DensityMatrix {
        match self {
            StateDocument::Density(d) => d,
            StateDocument::Pure(p) => p.density(),
        }
    }
}

fn sig_from_parts(dims: &[usize], labels: &[String]) -> Result<DimSignature> {
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    DimSignature::new(dims, &refs)
}

/// Parses a state document, dispatching on the shape of `re`.
pub fn parse_state(text: &str) -> Result<StateDocument> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        detail: format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column()),
    })?;
    let re_is_nested = value
        .get("re")
        .and_then(|v| v.as_array())
        .map(|a| a.first().is_some_and(|x| x.is_array()))
        .ok_or_else(|| Error::Parse {
            detail: "missing or non-array field \"re\"".to_string(),
        })?;
    if re_is_nested {
        let doc: DensityMatrixJson = serde_json::from_value(value).map_err(|e| Error::Parse {
            detail: format!("density matrix document: {e}"),
        })?;
        let n: usize = doc.dims.iter().product();
        if doc.re.len() != n
            || doc.im.len() != n
            || doc.re.iter().any(|r| r.len() != n)
            || doc.im.iter().any(|r| r.len() != n)
        {
            return Err(Error::Parse {
                detail: format!("matrix shape does not match dims product {n}"),
            });
        }
        let sig = sig_from_parts(&doc.dims, &doc.labels)?;
        let mat = ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(doc.re[i][j], doc.im[i][j]));
        Ok(StateDocument::Density(DensityMatrix::new(mat, sig)?))
    } else {
        let doc: PureStateJson = serde_json::from_value(value).map_err(|e| Error::Parse {
            detail: format!("pure state document: {e}"),
        })?;
        let n: usize = doc.dims.iter().product();
        if doc.re.len() != n || doc.im.len() != n {
            return Err(Error::Parse {
                detail: format!("amplitude count does not match dims product {n}"),
            });
        }
        let sig = sig_from_parts(&doc.dims, &doc.labels)?;
        let amps: Vec<Complex64> = doc
            .re
            .iter()
            .zip(doc.im.iter())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        Ok(StateDocument::Pure(PureState::new(amps, sig)?))
    }
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    let n = rho.dim();
    let m = rho.matrix();
    let doc = DensityMatrixJson {
        dims: rho.sig().dims().to_vec(),
        labels: rho.sig().labels().iter().map(|s| s.to_string()).collect(),
        re: (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
            .collect(),
        im: (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn pure_to_json(psi: &PureState) -> String {
    let doc = PureStateJson {
        dims: psi.sig().dims().to_vec(),
        labels: psi.sig().labels().iter().map(|s| s.to_string()).collect(),
        re: psi.amplitudes().iter().map(|z| z.re).collect(),
        im: psi.amplitudes().iter().map(|z| z.im).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

#[derive(Debug, Serialize, Deserialize)]
struct ComplexVecJson {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ComplexVecJson {
    fn to_vec(&self) -> Result<Vec<Complex64>> {
        if self.re.len() != self.im.len() {
            return Err(Error::Parse {
                detail: "re/im length mismatch".to_string(),
            });
        }
        Ok(self
            .re
            .iter()
            .zip(self.im.iter())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct OneMcSpecJson {
    alphas: ComplexVecJson,
    a_states: Vec<ComplexVecJson>,
    c_states: Vec<ComplexVecJson>,
}

/// Parses a 1-MC specification document:
/// `{"alphas": {"re": [..], "im": [..]}, "a_states": [...], "c_states": [...]}`.
pub fn parse_one_mc_spec(text: &str) -> Result<OneMcSpec> {
    let doc: OneMcSpecJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        detail: format!("1-MC spec: {e}"),
    })?;
    let alphas = doc.alphas.to_vec()?;
    let a_states: Result<Vec<_>> = doc.a_states.iter().map(|v| v.to_vec()).collect();
    let c_states: Result<Vec<_>> = doc.c_states.iter().map(|v| v.to_vec()).collect();
    OneMcSpec::new(alphas, a_states?, c_states?)
}

#[derive(Debug, Serialize, Deserialize)]
struct PseudoPurePairJson {
    p: f64,
    state: PureStateJson,
}

#[derive(Debug, Serialize, Deserialize)]
struct PseudoPureSpecJson {
    flag_dim: usize,
    pairs: Vec<PseudoPurePairJson>,
}

/// Parses a pseudo-pure specification:
/// `{"flag_dim": n, "pairs": [{"p": w, "state": <pure state>}, ...]}`.
pub fn parse_pseudo_pure_spec(text: &str) -> Result<(Vec<(f64, PureState)>, usize)> {
    let doc: PseudoPureSpecJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        detail: format!("pseudo-pure spec: {e}"),
    })?;
    let mut pairs = Vec::with_capacity(doc.pairs.len());
    for pair in doc.pairs {
        let n: usize = pair.state.dims.iter().product();
        if pair.state.re.len() != n || pair.state.im.len() != n {
            return Err(Error::Parse {
                detail: format!("amplitude count does not match dims product {n}"),
            });
        }
        let sig = sig_from_parts(&pair.state.dims, &pair.state.labels)?;
        let amps: Vec<Complex64> = pair
            .state
            .re
            .iter()
            .zip(pair.state.im.iter())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        pairs.push((pair.p, PureState::new(amps, sig)?));
    }
    Ok((pairs, doc.flag_dim))
}
