//! Measurement-optimized classical correlation J and quantum discord, plus
//! the structural zero-discord test.
//!
//! The supremum over complete POVMs is searched over rank-1 projective
//! measurements parameterized by a unitary (two Bloch angles on a qubit,
//! Givens products with phases for dimensions 3 and 4), with a
//! deterministic multi-start grid refined by Nelder-Mead. J is therefore a
//! lower bound on the true supremum and the reported discord an upper
//! bound; both are monotone in the budget. A non-projective rank-1 POVM
//! probe is available as a diagnostic.

use num_complex::Complex64;
use serde::Serialize;

use crate::entropy::{entropy_of_matrix, von_neumann_entropy};
use crate::linalg::{hermitian_eig, partial_inner, ComplexMatrix};
use crate::optim::{
    minimize_multistart, n_unitary_angles, unitary_from_angles, Budget, MultiStartResult,
};
use crate::states::DensityMatrix;
use crate::{Error, Result};

/// Largest measured-subsystem dimension the optimizer accepts.
pub const MEASURED_DIM_LIMIT: usize = 4;

/// Outcomes with probability at or below this contribute nothing to the
/// conditional entropy (the p -> 0 limit of p*S is 0).
const OUTCOME_PROB_CUTOFF: f64 = 1e-12;

/// A complete measurement: PSD elements summing to the identity.
#[derive(Debug, Clone, Serialize)]
pub struct Measurement {
    pub elements: Vec<ComplexMatrix>,
    pub rank_one: bool,
    /// Angles that generated the elements, when applicable.
    pub parameters: Vec<f64>,
}

impl Measurement {
    /// Rank-1 projective measurement from the columns of the parameterized
    /// unitary.
    pub fn projective_from_angles(dim: usize, angles: &[f64]) -> Self {
        let u = unitary_from_angles(dim, angles);
        let elements = (0..dim)
            .map(|k| {
                let col = u.column(k);
                ComplexMatrix::from_fn(dim, dim, |i, j| col[i] * col[j].conj())
            })
            .collect();
        Self {
            elements,
            rank_one: true,
            parameters: angles.to_vec(),
        }
    }

    /// Checks completeness (sum = identity within 1e-10) and positivity
    /// (eigenvalues >= -1e-10).
    pub fn validate(&self) -> Result<()> {
        let dim = self.elements[0].rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &self.elements {
            sum = sum.add(e);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > 1e-10 {
            return Err(Error::UnsupportedSignature {
                what: "measurement",
                detail: format!("elements sum deviates from identity by {dev:.3e}"),
            });
        }
        for e in &self.elements {
            let (w, _) = hermitian_eig(&e.symmetrized())?;
            if w[0] < -1e-10 {
                return Err(Error::NotPositive {
                    min_eigenvalue: w[0],
                });
            }
        }
        Ok(())
    }
}

/// What the optimizer did to reach the reported value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimizerTrace {
    pub starts: usize,
    pub iterations: usize,
    pub evals: usize,
    pub achieved_tol: f64,
}

/// Discord / classical-correlation result. `discord` is
/// `mutual_information - classical_correlation` by construction.
#[derive(Debug, Clone, Serialize)]
pub struct DiscordResult {
    pub discord: f64,
    pub classical_correlation: f64,
    pub mutual_information: f64,
    pub optimal_measurement: Measurement,
    pub trace: OptimizerTrace,
}

/// Reduces `rho` to the `(target, measured)` pair and reports their
/// positions within the reduced two-subsystem state.
fn reduce_to_pair(
    rho: &DensityMatrix,
    target: &str,
    measured: &str,
) -> Result<(DensityMatrix, usize, usize)> {
    if target == measured {
        return Err(Error::DuplicateLabel {
            label: target.to_string(),
        });
    }
    let pair = rho.partial_trace(&[target, measured])?;
    let t_pos = pair.sig().position(target)?;
    let m_pos = pair.sig().position(measured)?;
    Ok((pair, t_pos, m_pos))
}

/// Average conditional entropy of the target after measuring the columns of
/// a basis on the measured side; the quantity the optimizer minimizes.
fn avg_conditional_entropy(
    rho: &ComplexMatrix,
    dims: (usize, usize),
    m_pos: usize,
    basis: &ComplexMatrix,
) -> f64 {
    let dm = if m_pos == 1 { dims.1 } else { dims.0 };
    let mut acc = 0.0;
    for k in 0..dm {
        let col = basis.column(k);
        let block = partial_inner(rho, dims, m_pos, &col);
        let p = block.trace().re;
        if p <= OUTCOME_PROB_CUTOFF {
            continue;
        }
        acc += p * entropy_of_matrix(&block.scaled_re(1.0 / p).symmetrized());
    }
    acc
}

fn run_measurement_search(
    pair: &DensityMatrix,
    t_pos: usize,
    m_pos: usize,
    budget: &Budget,
) -> Result<(MultiStartResult, Measurement)> {
    let dims = (pair.sig().dims()[0], pair.sig().dims()[1]);
    let dm = if m_pos == 1 { dims.1 } else { dims.0 };
    if dm > MEASURED_DIM_LIMIT {
        return Err(Error::UnsupportedDimension {
            what: "measured subsystem",
            dim: dm,
            limit: MEASURED_DIM_LIMIT,
        });
    }
    let _ = t_pos;
    let n = n_unitary_angles(dm);
    let mat = pair.matrix().clone();
    let mut objective = move |angles: &[f64]| -> f64 {
        let u = unitary_from_angles(dm, angles);
        avg_conditional_entropy(&mat, dims, m_pos, &u)
    };
    // canonical starts: the computational basis and a balanced rotation
    let canonical = vec![vec![0.0; n], vec![std::f64::consts::FRAC_PI_4; n]];
    let res = minimize_multistart(&mut objective, &canonical, n, budget);
    let meas = Measurement::projective_from_angles(dm, &res.best.x);
    Ok((res, meas))
}

/// J(target|measured): classical correlation extracted by the best found
/// rank-1 projective measurement; a lower bound on the POVM supremum.
pub fn classical_correlation(
    rho: &DensityMatrix,
    target: &str,
    measured: &str,
    budget: &Budget,
) -> Result<DiscordResult> {
    let (pair, t_pos, m_pos) = reduce_to_pair(rho, target, measured)?;
    let target_marginal = pair.partial_trace(&[target])?;
    let s_target = von_neumann_entropy(&target_marginal);
    let mutual = crate::entropy::mutual_information(&pair, target, measured)?;
    let (res, meas) = run_measurement_search(&pair, t_pos, m_pos, budget)?;
    let j = s_target - res.best.value;
    Ok(DiscordResult {
        discord: mutual - j,
        classical_correlation: j,
        mutual_information: mutual,
        optimal_measurement: meas,
        trace: OptimizerTrace {
            starts: res.starts,
            iterations: res.best.iterations,
            evals: res.total_evals,
            achieved_tol: res.best.simplex_size,
        },
    })
}

/// Quantum discord `I - J` of the target given measurements on `measured`;
/// an upper bound on the true discord since J is a lower bound.
pub fn discord(
    rho: &DensityMatrix,
    target: &str,
    measured: &str,
    budget: &Budget,
) -> Result<DiscordResult> {
    classical_correlation(rho, target, measured, budget)
}

/// Diagnostic: J under a non-projective rank-1 POVM with `outcomes` elements
/// realized through an isometry into C^outcomes. Used to probe whether any
/// tested state rewards going beyond projective measurements.
pub fn povm_probe(
    rho: &DensityMatrix,
    target: &str,
    measured: &str,
    outcomes: usize,
    budget: &Budget,
) -> Result<f64> {
    let (pair, _t_pos, m_pos) = reduce_to_pair(rho, target, measured)?;
    let dims = (pair.sig().dims()[0], pair.sig().dims()[1]);
    let dm = if m_pos == 1 { dims.1 } else { dims.0 };
    if dm > MEASURED_DIM_LIMIT {
        return Err(Error::UnsupportedDimension {
            what: "measured subsystem",
            dim: dm,
            limit: MEASURED_DIM_LIMIT,
        });
    }
    if outcomes < dm {
        return Err(Error::UnsupportedDimension {
            what: "POVM outcome count",
            dim: outcomes,
            limit: dm,
        });
    }
    let s_target = von_neumann_entropy(&pair.partial_trace(&[target])?);
    let n = n_unitary_angles(outcomes);
    let mat = pair.matrix().clone();
    let mut objective = move |angles: &[f64]| -> f64 {
        // POVM elements E_k = W' |k><k| W with W the first dm columns of a
        // unitary on C^outcomes; each is rank <= 1 on the measured side.
        let u = unitary_from_angles(outcomes, angles);
        let mut acc = 0.0;
        for k in 0..outcomes {
            // v_k = row k of W restricted to the first dm columns
            let v: Vec<Complex64> = (0..dm).map(|j| u[(k, j)].conj()).collect();
            let block = partial_inner(&mat, dims, m_pos, &v);
            let p = block.trace().re;
            if p <= OUTCOME_PROB_CUTOFF {
                continue;
            }
            acc += p * entropy_of_matrix(&block.scaled_re(1.0 / p).symmetrized());
        }
        acc
    };
    let canonical = vec![vec![0.0; n], vec![std::f64::consts::FRAC_PI_4; n]];
    let res = minimize_multistart(&mut objective, &canonical, n, budget);
    Ok(s_target - res.best.value)
}

/// Verdict of the structural zero-discord test.
#[derive(Debug, Clone)]
pub struct ZeroDiscordVerdict {
    pub zero_discord: bool,
    /// Orthonormal basis of the measured subsystem exhibiting the
    /// block-diagonal product form, when it exists.
    pub basis: Option<Vec<Vec<Complex64>>>,
    /// Largest cross-block entry found in the candidate basis.
    pub max_cross_block: f64,
}

const ZERO_DISCORD_TOL: f64 = 1e-9;
const DEGENERACY_TOL: f64 = 1e-8;

/// Deterministic generic Hermitian probe used to split degenerate subspaces.
fn generic_probe(dim: usize, variant: usize) -> ComplexMatrix {
    let (r, s) = if variant == 0 { (0.37, 0.21) } else { (0.59, 0.13) };
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(1.0 + i as f64 * (1.3 + variant as f64), 0.0)
        } else {
            let lo = i.min(j) as f64;
            let hi = i.max(j) as f64;
            let re = r / (lo + hi + 1.0);
            let im = s / (lo + hi + 2.0);
            if i < j {
                Complex64::new(re, im)
            } else {
                Complex64::new(re, -im)
            }
        }
    })
}

/// Cross block `<u_k| rho |u_l>` on the measured side.
fn cross_block(
    rho: &ComplexMatrix,
    dims: (usize, usize),
    m_pos: usize,
    uk: &[Complex64],
    ul: &[Complex64],
) -> ComplexMatrix {
    let (d0, d1) = dims;
    if m_pos == 1 {
        ComplexMatrix::from_fn(d0, d0, |x, y| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d1 {
                for l in 0..d1 {
                    acc += uk[k].conj() * rho[(x * d1 + k, y * d1 + l)] * ul[l];
                }
            }
            acc
        })
    } else {
        ComplexMatrix::from_fn(d1, d1, |x, y| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d0 {
                for l in 0..d0 {
                    acc += uk[k].conj() * rho[(k * d1 + x, l * d1 + y)] * ul[l];
                }
            }
            acc
        })
    }
}

/// Structural test for the classical-quantum form: true iff there is an
/// orthonormal basis of the measured subsystem in which `rho` is
/// block-diagonal. The candidate basis is the measured marginal's
/// eigenbasis, refined inside degenerate eigenspaces by simultaneous
/// diagonalization of probe-contracted blocks; the verdict does not depend
/// on the variational optimizer.
pub fn zero_discord_check(rho: &DensityMatrix, measured: &str) -> Result<ZeroDiscordVerdict> {
    let labels = rho.sig().labels();
    if !labels.contains(&measured) {
        return Err(Error::UnknownLabel {
            label: measured.to_string(),
        });
    }
    let others: Vec<&str> = labels.iter().copied().filter(|l| *l != measured).collect();
    if others.is_empty() {
        return Err(Error::NotBipartite { subsystems: 1 });
    }
    // collapse all non-measured subsystems into one side, preserving order
    let pair = if rho.sig().len() == 2 {
        rho.clone()
    } else {
        // view: keep everything, treat non-measured side as a single block;
        // partial_trace keeps order, so simply recompute with a merged sig
        let m_pos = rho.sig().position(measured)?;
        let mut dims = Vec::new();
        let mut labels2: Vec<String> = Vec::new();
        let all_dims = rho.sig().dims();
        // merge contiguous runs; measured must stay its own factor
        let before: usize = all_dims[..m_pos].iter().product();
        let after: usize = all_dims[m_pos + 1..].iter().product();
        if before > 1 && after > 1 {
            return Err(Error::UnsupportedSignature {
                what: "zero_discord_check",
                detail: "measured subsystem must be first or last".to_string(),
            });
        }
        let rest_label = if measured == "rest" { "rest2" } else { "rest" };
        if before > 1 {
            dims.push(before);
            labels2.push(rest_label.to_string());
            dims.push(all_dims[m_pos]);
            labels2.push(measured.to_string());
        } else {
            dims.push(all_dims[m_pos]);
            labels2.push(measured.to_string());
            dims.push(after);
            labels2.push(rest_label.to_string());
        }
        let refs: Vec<&str> = labels2.iter().map(|s| s.as_str()).collect();
        DensityMatrix::new_unchecked(
            rho.matrix().clone(),
            crate::linalg::DimSignature::new(&dims, &refs)?,
        )
    };
    let measured_pair_pos = pair.sig().position(measured)?;
    let dims = (pair.sig().dims()[0], pair.sig().dims()[1]);
    let dm = if measured_pair_pos == 1 { dims.1 } else { dims.0 };

    // candidate basis: eigenbasis of the measured marginal
    let marginal = pair.partial_trace(&[measured])?;
    let (w, v) = hermitian_eig(marginal.matrix())?;
    let mut basis: Vec<Vec<Complex64>> = (0..dm).map(|k| v.column(k)).collect();

    // group degenerate eigenvalues and refine with the generic probes
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..dm {
        match clusters.last_mut() {
            Some(cl) if (w[k] - w[cl[0]]).abs() <= DEGENERACY_TOL => cl.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    let d_other = if measured_pair_pos == 1 { dims.0 } else { dims.1 };
    for variant in 0..2 {
        let probe = generic_probe(d_other, variant);
        let mut new_basis = basis.clone();
        for cl in &clusters {
            if cl.len() < 2 {
                continue;
            }
            // W[k,l] = Tr(probe * B_kl), Hermitian on the cluster
            let m = cl.len();
            let mut wm = ComplexMatrix::zeros(m, m);
            for (i, &k) in cl.iter().enumerate() {
                for (j, &l) in cl.iter().enumerate() {
                    let b = cross_block(
                        pair.matrix(),
                        dims,
                        measured_pair_pos,
                        &basis[k],
                        &basis[l],
                    );
                    wm[(i, j)] = probe.mul(&b).trace();
                }
            }
            let wm = wm.symmetrized();
            if let Ok((_, rot)) = hermitian_eig(&wm) {
                for (j_new, _) in cl.iter().enumerate() {
                    let mut col = vec![Complex64::new(0.0, 0.0); dm];
                    for (i_old, &k) in cl.iter().enumerate() {
                        for (t, c) in col.iter_mut().enumerate() {
                            *c += basis[k][t] * rot[(i_old, j_new)];
                        }
                    }
                    new_basis[cl[j_new]] = col;
                }
            }
        }
        basis = new_basis;
    }

    // verdict: all cross blocks vanish
    let mut max_cross: f64 = 0.0;
    for k in 0..dm {
        for l in 0..dm {
            if k == l {
                continue;
            }
            let b = cross_block(pair.matrix(), dims, measured_pair_pos, &basis[k], &basis[l]);
            max_cross = max_cross.max(b.max_abs());
        }
    }
    let zero = max_cross <= ZERO_DISCORD_TOL;
    Ok(ZeroDiscordVerdict {
        zero_discord: zero,
        basis: if zero { Some(basis) } else { None },
        max_cross_block: max_cross,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{tensor_product, DimSignature};
    use crate::states::{bell_state, example_family, ExampleFamilyParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quick_budget() -> Budget {
        Budget {
            starts: 8,
            iters: 120,
            seed: 1,
            simplex_tol: 1e-8,
        }
    }

    /// Classical-quantum test state: p = (1/2, 1/2), rho_0 = |0><0|,
    /// rho_1 = I/2 on `a`, flags on `b`.
    fn cq_state() -> DensityMatrix {
        let sig = DimSignature::new(&[2, 2], &["a", "b"]).unwrap();
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = c(0.5, 0.0); // |0><0| (x) |0><0| * 1/2
        m[(1, 1)] = c(0.25, 0.0); // I/2 (x) |1><1| * 1/2
        m[(3, 3)] = c(0.25, 0.0);
        DensityMatrix::new(m, sig).unwrap()
    }

    #[test]
    fn product_state_has_zero_j_and_discord() {
        let sig = DimSignature::new(&[2, 2], &["a", "b"]).unwrap();
        let prod = DensityMatrix::new(
            tensor_product(
                &ComplexMatrix::from_diag(&[0.8, 0.2]),
                &ComplexMatrix::from_diag(&[0.6, 0.4]),
            ),
            sig,
        )
        .unwrap();
        let r = classical_correlation(&prod, "a", "b", &quick_budget()).unwrap();
        assert!(r.classical_correlation.abs() < 1e-9);
        assert!(r.discord.abs() < 1e-9);
    }

    #[test]
    fn bell_state_j_and_discord() {
        let bell = bell_state().density();
        let r = discord(&bell, "a", "b", &quick_budget()).unwrap();
        assert!((r.classical_correlation - 1.0).abs() < 1e-6);
        assert!((r.mutual_information - 2.0).abs() < 1e-10);
        assert!((r.discord - 1.0).abs() < 1e-6);
        assert!(
            (r.discord - (r.mutual_information - r.classical_correlation)).abs() < 1e-12
        );
    }

    #[test]
    fn classical_quantum_state_has_zero_discord() {
        let rho = cq_state();
        let r = discord(&rho, "a", "b", &quick_budget()).unwrap();
        // measuring the flag basis attains the mutual information
        assert!(r.discord.abs() < 1e-7, "discord {}", r.discord);
        let sa = von_neumann_entropy(&rho.partial_trace(&["a"]).unwrap());
        // J = S_a - 1/2; here S_a = h(1/4)
        let expect = sa - 0.5;
        assert!((r.classical_correlation - expect).abs() < 1e-7);
        assert!((r.mutual_information - expect).abs() < 1e-10);
    }

    #[test]
    fn discord_example_family_matches_negative_conditional_entropy() {
        let (_, sigma, _) = example_family(
            &ExampleFamilyParams::new(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_4)
                .unwrap(),
        );
        let r = discord(&sigma, "a", "b", &Budget::default()).unwrap();
        assert!((r.discord - 0.399124).abs() < 1e-5, "discord {}", r.discord);
    }

    #[test]
    fn budget_doubling_never_decreases_j() {
        let (_, sigma, _) = example_family(&ExampleFamilyParams::new(0.9, 0.6).unwrap());
        let b1 = Budget {
            starts: 6,
            iters: 80,
            seed: 3,
            simplex_tol: 1e-8,
        };
        let b2 = b1.scaled(2);
        let j1 = classical_correlation(&sigma, "a", "b", &b1)
            .unwrap()
            .classical_correlation;
        let j2 = classical_correlation(&sigma, "a", "b", &b2)
            .unwrap()
            .classical_correlation;
        assert!(j2 >= j1 - 1e-12, "j1 = {j1}, j2 = {j2}");
    }

    #[test]
    fn measured_dimension_limit_enforced() {
        let sig = DimSignature::new(&[2, 5], &["a", "b"]).unwrap();
        let rho = crate::states::random_density_matrix(&sig, 3, 11).unwrap();
        assert!(matches!(
            classical_correlation(&rho, "a", "b", &quick_budget()),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn optimal_measurement_is_valid() {
        let (_, sigma, _) = example_family(&ExampleFamilyParams::new(0.7, 0.8).unwrap());
        let r = discord(&sigma, "a", "b", &quick_budget()).unwrap();
        r.optimal_measurement.validate().unwrap();
        assert!(r.optimal_measurement.rank_one);
    }

    #[test]
    fn zero_discord_structural_verdicts() {
        // classical-quantum state: true, flag basis
        let rho = cq_state();
        let v = zero_discord_check(&rho, "b").unwrap();
        assert!(v.zero_discord);
        let basis = v.basis.unwrap();
        // each basis vector is a computational basis vector up to phase
        for col in &basis {
            let big: usize = (0..2).max_by(|&i, &j| col[i].norm().total_cmp(&col[j].norm())).unwrap();
            assert!((col[big].norm() - 1.0).abs() < 1e-9);
        }

        // Bell state: false
        let v = zero_discord_check(&bell_state().density(), "b").unwrap();
        assert!(!v.zero_discord);
        assert!(v.max_cross_block > 1e-3);

        // rho_ac of the example family: separable but discordant
        let (_, _, rho_ac) = example_family(&ExampleFamilyParams::new(0.9, 0.7).unwrap());
        let v = zero_discord_check(&rho_ac, "c").unwrap();
        assert!(!v.zero_discord);
        let ppt = crate::states::is_ppt(&rho_ac, "c").unwrap();
        assert!(ppt.ppt);
    }

    #[test]
    fn zero_discord_handles_degenerate_marginal() {
        // equal-weight CQ state with maximally mixed flag marginal:
        // rho = 1/2 |r0><r0| (x) |+><+| + 1/2 |r1><r1| (x) |-><-|
        let sig = DimSignature::new(&[2, 2], &["a", "b"]).unwrap();
        let plus = [c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)];
        let minus = [c(0.5f64.sqrt(), 0.0), c(-(0.5f64.sqrt()), 0.0)];
        let r0 = [c(1.0, 0.0), c(0.0, 0.0)];
        let r1 = [c(0.6, 0.0), c(0.0, 0.8)];
        let mut m = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                let (ia, ib) = (i / 2, i % 2);
                let (ja, jb) = (j / 2, j % 2);
                m[(i, j)] = 0.5 * r0[ia] * r0[ja].conj() * plus[ib] * plus[jb].conj()
                    + 0.5 * r1[ia] * r1[ja].conj() * minus[ib] * minus[jb].conj();
            }
        }
        let rho = DensityMatrix::new(m, sig).unwrap();
        let v = zero_discord_check(&rho, "b").unwrap();
        assert!(v.zero_discord, "cross block {}", v.max_cross_block);
        // and a genuinely discordant state with degenerate marginal stays false
        let v = zero_discord_check(&bell_state().density(), "a").unwrap();
        assert!(!v.zero_discord);
    }

    #[test]
    fn povm_probe_does_not_beat_projective_on_test_states(){
        let budget = quick_budget();
        for (theta, phi) in [(0.9f64, 0.6f64), (1.2, 0.3)] {
            let (_, sigma, _) =
                example_family(&ExampleFamilyParams::new(theta, phi).unwrap());
            let proj = classical_correlation(&sigma, "a", "b", &Budget::default())
                .unwrap()
                .classical_correlation;
            let povm = povm_probe(&sigma, "a", "b", 3, &budget).unwrap();
            assert!(povm <= proj + 1e-6, "povm {povm} vs projective {proj}");
        }
    }
}
