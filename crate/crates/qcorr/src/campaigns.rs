//! Seeded verification campaigns and the two-angle family sweep.
//!
//! Each campaign draws deterministic states from a seed, evaluates an
//! identity or inequality with independent routes on both sides, and
//! reports worst-case deviations. Trials run in parallel; results are
//! assembled in trial order, so outputs are identical for a fixed seed
//! regardless of scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::discord;
use crate::entanglement::{
    eof_2q, lemma1_check, ree_estimate, EntanglementReport, ReeBudget, StateClass,
};
use crate::entropy::{conditional_entropy, von_neumann_entropy};
use crate::linalg::DimSignature;
use crate::optim::Budget;
use crate::states::{
    example_family, is_ppt, random_density_matrix, random_pure_state, ExampleFamilyParams,
};
use crate::Result;

fn trial_seed(seed: u64, index: u64) -> u64 {
    // splitmix-style spreading so trials are independent streams
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Worst-case deviations of the tripartite EOF identities over random pure
/// three-qubit states.
#[derive(Debug, Clone, Serialize)]
pub struct KoashiWinterOutcome {
    pub trials: usize,
    /// max |eof_kw - eof_2q|.
    pub worst_abs: f64,
    /// min (eof_kw - eof_2q): must stay above -1e-9 (one-sided residual).
    pub min_signed: f64,
    /// max |eof + J - S_a| for the dual identity.
    pub dual_worst_abs: f64,
    /// max (eof + J - S_a): must stay below 1e-9 (one-sided residual).
    pub dual_max_signed: f64,
    pub failures: usize,
}

impl KoashiWinterOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Checks `eof = discord - conditional entropy` and `eof + J = S_a` on
/// seeded random pure 2x2x2 states, both sides computed independently.
pub fn koashi_winter_campaign(
    trials: usize,
    seed: u64,
    tol: f64,
    budget: &Budget,
) -> Result<KoashiWinterOutcome> {
    let sig = DimSignature::new(&[2, 2, 2], &["a", "b", "c"])?;
    let rows: Vec<(f64, f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let psi = random_pure_state(&sig, trial_seed(seed, i as u64));
            let rho_ab = psi.reduced(&["a", "b"]).expect("labels");
            let rho_ac = psi.reduced(&["a", "c"]).expect("labels");
            let eof = eof_2q(&rho_ab).expect("two qubits");
            let d = discord(&rho_ac, "a", "c", budget).expect("supported dims");
            let s_cond = conditional_entropy(&rho_ab, "a", "b").expect("labels");
            let kw = d.discord - s_cond;
            let s_a = von_neumann_entropy(&psi.reduced(&["a"]).expect("labels"));
            let dual = eof + d.classical_correlation - s_a;
            (kw - eof, (kw - eof).abs(), dual, dual.abs())
        })
        .collect();
    let mut out = KoashiWinterOutcome {
        trials,
        worst_abs: 0.0,
        min_signed: f64::INFINITY,
        dual_worst_abs: 0.0,
        dual_max_signed: f64::NEG_INFINITY,
        failures: 0,
    };
    for (signed, abs, dual_signed, dual_abs) in rows {
        out.worst_abs = out.worst_abs.max(abs);
        out.min_signed = out.min_signed.min(signed);
        out.dual_worst_abs = out.dual_worst_abs.max(dual_abs);
        out.dual_max_signed = out.dual_max_signed.max(dual_signed);
        // the variational J underestimates, so the identity residuals are
        // one-sided: kw >= eof and eof + J <= S_a, both up to round-off
        if abs > tol || signed < -1e-9 || dual_abs > tol || dual_signed > 1e-9 {
            out.failures += 1;
        }
    }
    Ok(out)
}

/// Strict-gap campaign outcome over mixed entangled non-pseudo-pure states.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Outcome {
    pub trials: usize,
    pub draws_used: usize,
    pub min_gap: f64,
    pub counterexamples: usize,
}

impl Lemma1Outcome {
    pub fn passed(&self) -> bool {
        self.counterexamples == 0
    }
}

/// Draws full-rank two-qubit states, keeps the mixed entangled
/// non-pseudo-pure ones, and verifies `eof - coherent_information >=
/// min_gap` on every accepted draw.
pub fn lemma1_campaign(trials: usize, seed: u64, min_gap: f64) -> Result<Lemma1Outcome> {
    let sig = DimSignature::new(&[2, 2], &["a", "b"])?;
    // oversample; acceptance below filters down
    let mut accepted = 0usize;
    let mut draws_used = 0usize;
    let mut min_gap_seen = f64::INFINITY;
    let mut counterexamples = 0usize;
    let mut index = 0u64;
    while accepted < trials {
        let batch: Vec<Option<f64>> = (0..256u64)
            .into_par_iter()
            .map(|k| {
                let rho =
                    random_density_matrix(&sig, 4, trial_seed(seed, index + k)).expect("rank ok");
                let v = lemma1_check(&rho).expect("two qubits");
                (v.class == StateClass::MixedEntangled).then_some(v.gap)
            })
            .collect();
        for item in batch {
            draws_used += 1;
            if let Some(gap) = item {
                accepted += 1;
                min_gap_seen = min_gap_seen.min(gap);
                if gap < min_gap {
                    counterexamples += 1;
                }
                if accepted == trials {
                    break;
                }
            }
        }
        index += 256;
    }
    Ok(Lemma1Outcome {
        trials,
        draws_used,
        min_gap: min_gap_seen,
        counterexamples,
    })
}

/// Grid campaign outcome for the 1-MC equality chain.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem2GridOutcome {
    pub grid: usize,
    /// max |discord + S(a|b)| over the grid.
    pub worst_discord_dev: f64,
    /// Separability iff |S(a|b)| = 0 held at every grid point.
    pub separability_iff_ok: bool,
    /// rho_ac passed the separability certificate at every grid point.
    pub hypothesis_ok: bool,
    /// max |ree - (-S(a|b))| over the REE subgrid, when requested.
    pub worst_ree_dev: Option<f64>,
    pub failures: usize,
}

impl Theorem2GridOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.separability_iff_ok && self.hypothesis_ok
    }
}

/// Verifies `discord(a|b) = -S(a|b)` on an n x n (theta, phi) grid of the
/// example family, the separability criterion `PPT(sigma_ab) iff S(a|b) =
/// 0`, the separability of every complementary state, and optionally the
/// REE equality on a coarser subgrid.
pub fn theorem2_grid_campaign(
    n: usize,
    seed: u64,
    tol: f64,
    budget: &Budget,
    ree_check: Option<(usize, f64, ReeBudget)>,
) -> Result<Theorem2GridOutcome> {
    let angles: Vec<f64> = (0..n)
        .map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / (n - 1) as f64)
        .collect();
    struct PointResult {
        discord_dev: f64,
        iff_ok: bool,
        hyp_ok: bool,
    }
    let points: Vec<PointResult> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (ti, pi) = (idx / n, idx % n);
            let params = ExampleFamilyParams::new(angles[ti], angles[pi]).expect("grid in range");
            let (_, sigma, rho_ac) = example_family(&params);
            let s_cond = conditional_entropy(&sigma, "a", "b").expect("labels");
            let local_budget = Budget {
                seed: budget.seed ^ trial_seed(seed, idx as u64),
                ..*budget
            };
            let d = discord(&sigma, "a", "b", &local_budget).expect("supported dims");
            let dev = (d.discord - (-s_cond)).abs();
            let ppt_sigma = is_ppt(&sigma, "b").expect("bipartite").ppt;
            let iff_ok = ppt_sigma == (s_cond.abs() <= 1e-9);
            let v_ac = is_ppt(&rho_ac, "c").expect("bipartite");
            let hyp_ok = v_ac.ppt && v_ac.certifies_separability;
            PointResult {
                discord_dev: dev,
                iff_ok,
                hyp_ok,
            }
        })
        .collect();
    let worst_discord_dev = points.iter().map(|p| p.discord_dev).fold(0.0, f64::max);
    let separability_iff_ok = points.iter().all(|p| p.iff_ok);
    let hypothesis_ok = points.iter().all(|p| p.hyp_ok);
    let mut failures = points.iter().filter(|p| p.discord_dev > tol).count();

    let worst_ree_dev = if let Some((sub_n, ree_tol, ree_budget)) = ree_check {
        let sub: Vec<f64> = (0..sub_n)
            .map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / (sub_n - 1) as f64)
            .collect();
        let devs: Vec<f64> = (0..sub_n * sub_n)
            .into_par_iter()
            .map(|idx| {
                let (ti, pi) = (idx / sub_n, idx % sub_n);
                let params = ExampleFamilyParams::new(sub[ti], sub[pi]).expect("grid in range");
                let (_, sigma, _) = example_family(&params);
                let target = -conditional_entropy(&sigma, "a", "b").expect("labels");
                let est = ree_estimate(&sigma, &ree_budget).expect("supported dims");
                (est.value - target).abs()
            })
            .collect();
        let worst = devs.iter().copied().fold(0.0, f64::max);
        failures += devs.iter().filter(|&&d| d > ree_tol).count();
        Some(worst)
    } else {
        None
    };

    Ok(Theorem2GridOutcome {
        grid: n,
        worst_discord_dev,
        separability_iff_ok,
        hypothesis_ok,
        worst_ree_dev,
        failures,
    })
}

/// Chain-audit outcome over random-state entanglement reports.
#[derive(Debug, Clone, Serialize)]
pub struct ChainOutcome {
    pub trials: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
}

impl ChainOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Emits an [`EntanglementReport`] for seeded random full-rank two-qubit
/// states and checks the bound-level measure ordering on every one.
pub fn chain_campaign(trials: usize, seed: u64, ree_budget: &ReeBudget) -> Result<ChainOutcome> {
    let sig = DimSignature::new(&[2, 2], &["a", "b"])?;
    let results: Vec<Option<String>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let rho = random_density_matrix(&sig, 4, trial_seed(seed, i as u64)).expect("rank ok");
            let budget = ReeBudget {
                seed: trial_seed(seed, i as u64),
                ..*ree_budget
            };
            let rep = EntanglementReport::compute(&rho, &budget).expect("two qubits");
            rep.check_chain(1e-9).err().map(|e| format!("trial {i}: {e}"))
        })
        .collect();
    let violations = results.iter().filter(|r| r.is_some()).count();
    let first_violation = results.into_iter().flatten().next();
    Ok(ChainOutcome {
        trials,
        violations,
        first_violation,
    })
}

/// One sweep row of the two-angle family.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub phi: f64,
    pub theta: f64,
    pub e_c: f64,
    pub e_d: f64,
    pub delta: f64,
    pub discord_ab_numeric: f64,
    pub s_cond_ab: f64,
    pub ree_upper: f64,
    pub ppt_ac: bool,
}

/// Sweeps phi over `[0, pi/2]` with `phi_steps` points for every theta.
///
/// Each row reports the exact measures (entanglement cost through the
/// concurrence, distillable entanglement as `-S(a|b)`, their difference)
/// next to the numerical discord and REE cross-checks. `delta` is computed
/// as `e_c - e_d` so the identity holds as emitted. Rows are ordered by
/// (theta, phi) regardless of scheduling.
pub fn sweep_rows(
    thetas: &[f64],
    phi_steps: usize,
    seed: u64,
    budget: &Budget,
    ree_budget: &ReeBudget,
) -> Result<Vec<SweepRow>> {
    if phi_steps < 2 {
        return Err(crate::Error::OutOfRange {
            what: "phi_steps",
            value: phi_steps as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    for &t in thetas {
        ExampleFamilyParams::new(t, 0.0)?;
    }
    let phis: Vec<f64> = (0..phi_steps)
        .map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / (phi_steps - 1) as f64)
        .collect();
    let jobs: Vec<(usize, f64, f64)> = thetas
        .iter()
        .enumerate()
        .flat_map(|(ti, &t)| {
            phis.iter()
                .enumerate()
                .map(move |(pi, &p)| (ti * phi_steps + pi, t, p))
        })
        .collect();
    let mut rows: Vec<(usize, SweepRow)> = jobs
        .into_par_iter()
        .map(|(idx, theta, phi)| {
            let params = ExampleFamilyParams::new(theta, phi).expect("validated");
            let (_, sigma, rho_ac) = example_family(&params);
            let s_cond = conditional_entropy(&sigma, "a", "b").expect("labels");
            let e_d = -s_cond;
            let e_c = eof_2q(&sigma).expect("two qubits");
            let local_budget = Budget {
                seed: budget.seed ^ trial_seed(seed, idx as u64),
                ..*budget
            };
            let d = discord(&sigma, "a", "b", &local_budget).expect("supported dims");
            let local_ree = ReeBudget {
                seed: trial_seed(seed, idx as u64),
                ..*ree_budget
            };
            let ree = ree_estimate(&sigma, &local_ree).expect("supported dims");
            let ppt_ac = is_ppt(&rho_ac, "c").expect("bipartite").ppt;
            (
                idx,
                SweepRow {
                    phi,
                    theta,
                    e_c,
                    e_d,
                    delta: e_c - e_d,
                    discord_ab_numeric: d.discord,
                    s_cond_ab: s_cond,
                    ree_upper: ree.value,
                    ppt_ac,
                },
            )
        })
        .collect();
    rows.sort_by_key(|(idx, _)| *idx);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}
