//! Command-line front end: state construction and I/O, single-state
//! measurement, verification campaigns, and parameter sweeps.
//!
//! Exit codes: 0 success, 1 campaign failure, 2 input error, 3 state
//! invariant violation, 4 output I/O error.

mod angle;
mod emit;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcorr::campaigns::{
    chain_campaign, koashi_winter_campaign, lemma1_campaign, sweep_rows, theorem2_grid_campaign,
    SweepRow,
};
use qcorr::correlations::discord;
use qcorr::entanglement::{EntanglementReport, ReeBudget};
use qcorr::entropy::EntropyReport;
use qcorr::io::{
    density_to_json, parse_one_mc_spec, parse_pseudo_pure_spec, parse_state, pure_to_json,
    StateDocument,
};
use qcorr::optim::Budget;
use qcorr::states::{
    bell_state, example_family, make_one_mc, make_pseudo_pure, random_density_matrix,
    random_pure_state, DensityMatrix, ExampleFamilyParams,
};
use qcorr::{DimSignature, Error as QError};

use angle::{parse_angle, parse_angle_list};
use emit::{round9, sig9};

const EXIT_CAMPAIGN_FAIL: i32 = 1;
const EXIT_INPUT: i32 = 2;
const EXIT_INVARIANT: i32 = 3;
const EXIT_IO: i32 = 4;

#[derive(Parser)]
#[command(
    name = "qcorr",
    about = "Quantum correlation and entanglement measures for small systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build states and write them as JSON documents.
    State {
        #[command(subcommand)]
        command: StateVerb,
    },
    /// Measure a state file and emit the requested reports as JSON.
    Measure(MeasureArgs),
    /// Sweep the two-angle family and emit one row per (theta, phi).
    Sweep(SweepArgs),
    /// Run a named verification campaign; nonzero exit on failure.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum StateVerb {
    /// Construct a state and emit its JSON document.
    Make {
        #[command(subcommand)]
        command: StateCommand,
    },
}

#[derive(Subcommand)]
enum StateCommand {
    /// The maximally entangled two-qubit pair.
    Bell(OutArg),
    /// Two-angle family member; emits sigma_ab by default.
    Example(ExampleArgs),
    /// One-way maximally correlated state from a spec file.
    OneMc(OneMcArgs),
    /// Pseudo-pure mixture from a spec file.
    PseudoPure(PseudoPureArgs),
    /// Seeded random pure state or density matrix.
    Random(RandomArgs),
}

#[derive(Args)]
struct OutArg {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ExampleArgs {
    /// Angle theta in [0, pi/2]; accepts `pi/` fractions.
    #[arg(long)]
    theta: String,
    /// Angle phi in [0, pi/2]; accepts `pi/` fractions.
    #[arg(long)]
    phi: String,
    /// Which artifact of the family to emit.
    #[arg(long, value_enum, default_value_t = ExampleWhich::SigmaAb)]
    which: ExampleWhich,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleWhich {
    /// The 1-MC marginal sigma_ab.
    SigmaAb,
    /// The tripartite purification.
    Psi,
    /// The complementary (separable) marginal rho_ac.
    RhoAc,
}

#[derive(Args)]
struct OneMcArgs {
    /// JSON spec: {"alphas": {re, im}, "a_states": [...], "c_states": [...]}.
    #[arg(long)]
    spec: std::path::PathBuf,
    /// Emit the marginal (default) or the tripartite purification.
    #[arg(long, value_enum, default_value_t = OneMcWhich::RhoAb)]
    which: OneMcWhich,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum OneMcWhich {
    RhoAb,
    Psi,
}

#[derive(Args)]
struct PseudoPureArgs {
    /// JSON spec: {"flag_dim": n, "pairs": [{"p", "state"}, ...]}.
    #[arg(long)]
    spec: std::path::PathBuf,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct RandomArgs {
    /// Comma-separated subsystem dimensions, e.g. `2,2`.
    #[arg(long)]
    dims: String,
    /// Density-matrix rank; omit for a pure state.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct MeasureArgs {
    /// State file (pure or density-matrix document).
    file: std::path::PathBuf,
    /// Comma-separated list: entropy, discord, entanglement.
    #[arg(long, default_value = "entropy,discord,entanglement")]
    measures: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 24)]
    budget_starts: usize,
    #[arg(long, default_value_t = 200)]
    budget_iters: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated theta values; accepts `pi/` fractions.
    #[arg(long)]
    thetas: String,
    /// Number of phi grid points over [0, pi/2] (at least 2).
    #[arg(long)]
    phi_steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 24)]
    budget_starts: usize,
    #[arg(long, default_value_t = 200)]
    budget_iters: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct VerifyArgs {
    /// Campaign: koashi-winter, lemma1, theorem2-grid, chain.
    #[arg(long)]
    campaign: String,
    /// Trial count (grid side for theorem2-grid).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance override; campaign-specific default when omitted.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 24)]
    budget_starts: usize,
    #[arg(long, default_value_t = 200)]
    budget_iters: usize,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::State {
            command: StateVerb::Make { command },
        } => run_state(command),
        Command::Measure(args) => run_measure(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Verify(args) => run_verify(args),
    };
    std::process::exit(code);
}

fn fail(code: i32, msg: &str) -> i32 {
    eprintln!("error: {msg}");
    code
}

/// Input errors exit 2, state-invariant violations exit 3.
fn classify(err: &QError) -> i32 {
    match err {
        QError::NotNormalized { .. }
        | QError::TraceNotOne { .. }
        | QError::NotPositive { .. }
        | QError::NotHermitian { .. } => EXIT_INVARIANT,
        _ => EXIT_INPUT,
    }
}

fn write_out(out: &Option<std::path::PathBuf>, text: &str) -> i32 {
    match out {
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => 0,
            Err(e) => fail(EXIT_IO, &format!("cannot write {}: {e}", path.display())),
        },
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            0
        }
    }
}

fn run_state(cmd: StateCommand) -> i32 {
    match cmd {
        StateCommand::Bell(out) => write_out(&out.out, &pure_to_json(&bell_state())),
        StateCommand::Example(args) => {
            let theta = match parse_angle(&args.theta) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_INPUT, &e),
            };
            let phi = match parse_angle(&args.phi) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_INPUT, &e),
            };
            let params = match ExampleFamilyParams::new(theta, phi) {
                Ok(p) => p,
                Err(e) => return fail(EXIT_INPUT, &e.to_string()),
            };
            let (psi, sigma_ab, rho_ac) = example_family(&params);
            let text = match args.which {
                ExampleWhich::SigmaAb => density_to_json(&sigma_ab),
                ExampleWhich::Psi => pure_to_json(&psi),
                ExampleWhich::RhoAc => density_to_json(&rho_ac),
            };
            write_out(&args.out.out, &text)
        }
        StateCommand::OneMc(args) => {
            let text = match std::fs::read_to_string(&args.spec) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_INPUT, &format!("cannot read spec: {e}")),
            };
            let spec = match parse_one_mc_spec(&text) {
                Ok(s) => s,
                Err(e) => return fail(classify(&e), &e.to_string()),
            };
            let (psi, rho_ab) = match make_one_mc(&spec) {
                Ok(v) => v,
                Err(e) => return fail(classify(&e), &e.to_string()),
            };
            let out = match args.which {
                OneMcWhich::RhoAb => density_to_json(&rho_ab),
                OneMcWhich::Psi => pure_to_json(&psi),
            };
            write_out(&args.out.out, &out)
        }
        StateCommand::PseudoPure(args) => {
            let text = match std::fs::read_to_string(&args.spec) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_INPUT, &format!("cannot read spec: {e}")),
            };
            let (pairs, flag_dim) = match parse_pseudo_pure_spec(&text) {
                Ok(v) => v,
                Err(e) => return fail(classify(&e), &e.to_string()),
            };
            match make_pseudo_pure(&pairs, flag_dim) {
                Ok(rho) => write_out(&args.out.out, &density_to_json(&rho)),
                Err(e) => fail(classify(&e), &e.to_string()),
            }
        }
        StateCommand::Random(args) => {
            let dims: Result<Vec<usize>, _> =
                args.dims.split(',').map(|s| s.trim().parse()).collect();
            let dims = match dims {
                Ok(d) if !d.is_empty() => d,
                _ => return fail(EXIT_INPUT, &format!("bad dims list: {:?}", args.dims)),
            };
            let sig = match DimSignature::with_auto_labels(&dims) {
                Ok(s) => s,
                Err(e) => return fail(EXIT_INPUT, &e.to_string()),
            };
            let text = match args.rank {
                None => pure_to_json(&random_pure_state(&sig, args.seed)),
                Some(rank) => match random_density_matrix(&sig, rank, args.seed) {
                    Ok(rho) => density_to_json(&rho),
                    Err(e) => return fail(EXIT_INPUT, &e.to_string()),
                },
            };
            write_out(&args.out.out, &text)
        }
    }
}

fn run_measure(args: MeasureArgs) -> i32 {
    let text = match std::fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => {
            return fail(
                EXIT_INPUT,
                &format!("cannot read {}: {e}", args.file.display()),
            )
        }
    };
    let rho: DensityMatrix = match parse_state(&text) {
        Ok(StateDocument::Density(d)) => d,
        Ok(StateDocument::Pure(p)) => p.density(),
        Err(e) => return fail(classify(&e), &e.to_string()),
    };
    let wanted: Vec<&str> = args.measures.split(',').map(|s| s.trim()).collect();
    for w in &wanted {
        if !["entropy", "discord", "entanglement"].contains(w) {
            return fail(EXIT_INPUT, &format!("unknown measure: {w}"));
        }
    }
    let budget = Budget {
        starts: args.budget_starts,
        iters: args.budget_iters,
        seed: args.seed,
        simplex_tol: 1e-8,
    };

    let mut doc = serde_json::Map::new();
    doc.insert(
        "state".to_string(),
        serde_json::json!({
            "dims": rho.sig().dims(),
            "labels": rho.sig().labels(),
        }),
    );
    if wanted.contains(&"entropy") {
        match EntropyReport::compute(&rho) {
            Ok(rep) => {
                doc.insert("entropy".to_string(), serde_json::to_value(&rep).unwrap());
            }
            Err(e) => return fail(classify(&e), &e.to_string()),
        }
    }
    if wanted.contains(&"discord") {
        let labels = rho.sig().labels();
        if labels.len() != 2 {
            return fail(EXIT_INPUT, "discord needs a two-subsystem state");
        }
        match discord(&rho, labels[0], labels[1], &budget) {
            Ok(rep) => {
                doc.insert("discord".to_string(), serde_json::to_value(&rep).unwrap());
            }
            Err(e) => return fail(classify(&e), &e.to_string()),
        }
    }
    if wanted.contains(&"entanglement") {
        let ree_budget = ReeBudget {
            seed: args.seed,
            ..ReeBudget::default()
        };
        match EntanglementReport::compute(&rho, &ree_budget) {
            Ok(rep) => {
                doc.insert(
                    "entanglement".to_string(),
                    serde_json::to_value(&rep).unwrap(),
                );
            }
            Err(e) => return fail(classify(&e), &e.to_string()),
        }
    }
    let text = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).unwrap();
    write_out(&args.out.out, &text)
}

const CSV_HEADER: &str = "phi,theta,E_C,E_D,Delta,discord_ab_numeric,S_cond_ab,ree_upper,ppt_ac";

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            sig9(r.phi),
            sig9(r.theta),
            sig9(r.e_c),
            sig9(r.e_d),
            sig9(r.delta),
            sig9(r.discord_ab_numeric),
            sig9(r.s_cond_ab),
            sig9(r.ree_upper),
            r.ppt_ac
        ));
    }
    out
}

fn sweep_json(rows: &[SweepRow]) -> String {
    let rows: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "phi": round9(r.phi),
                "theta": round9(r.theta),
                "E_C": round9(r.e_c),
                "E_D": round9(r.e_d),
                "Delta": round9(r.delta),
                "discord_ab_numeric": round9(r.discord_ab_numeric),
                "S_cond_ab": round9(r.s_cond_ab),
                "ree_upper": round9(r.ree_upper),
                "ppt_ac": r.ppt_ac,
            })
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({ "rows": rows })).unwrap()
}

fn run_sweep(args: SweepArgs) -> i32 {
    let thetas = match parse_angle_list(&args.thetas) {
        Ok(t) if !t.is_empty() => t,
        Ok(_) => return fail(EXIT_INPUT, "empty theta list"),
        Err(e) => return fail(EXIT_INPUT, &e),
    };
    let budget = Budget {
        starts: args.budget_starts,
        iters: args.budget_iters,
        seed: args.seed,
        simplex_tol: 1e-8,
    };
    let ree_budget = ReeBudget {
        seed: args.seed,
        ..ReeBudget::default()
    };
    let rows = match sweep_rows(&thetas, args.phi_steps, args.seed, &budget, &ree_budget) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_INPUT, &e.to_string()),
    };
    let text = match args.format {
        Format::Csv => sweep_csv(&rows),
        Format::Json => sweep_json(&rows),
    };
    write_out(&args.out.out, &text)
}

fn run_verify(args: VerifyArgs) -> i32 {
    if args.trials == Some(0) {
        return fail(EXIT_INPUT, "trials must be at least 1");
    }
    if args.tol.is_some_and(|t| t <= 0.0) {
        return fail(EXIT_INPUT, "tolerance must be positive");
    }
    let budget = Budget {
        starts: args.budget_starts,
        iters: args.budget_iters,
        seed: args.seed,
        simplex_tol: 1e-8,
    };
    match args.campaign.as_str() {
        "koashi-winter" => {
            let trials = args.trials.unwrap_or(200);
            let tol = args.tol.unwrap_or(1e-4);
            match koashi_winter_campaign(trials, args.seed, tol, &budget) {
                Ok(out) => {
                    println!(
                        "verify: koashi-winter: {} trials, worst |dev| {} (tol {}), one-sided floor {}, dual worst |dev| {}, dual cap {}",
                        out.trials,
                        sig9(out.worst_abs),
                        sig9(tol),
                        sig9(out.min_signed),
                        sig9(out.dual_worst_abs),
                        sig9(out.dual_max_signed),
                    );
                    let pass = out.passed();
                    println!(
                        "verify: koashi-winter: {}",
                        if pass { "PASS" } else { "FAIL" }
                    );
                    if pass {
                        0
                    } else {
                        EXIT_CAMPAIGN_FAIL
                    }
                }
                Err(e) => fail(EXIT_INPUT, &e.to_string()),
            }
        }
        "lemma1" => {
            let trials = args.trials.unwrap_or(300);
            let min_gap = args.tol.unwrap_or(1e-6);
            match lemma1_campaign(trials, args.seed, min_gap) {
                Ok(out) => {
                    println!(
                        "verify: lemma1: {} accepted draws ({} sampled), min gap {} (floor {}), counterexamples {}",
                        out.trials,
                        out.draws_used,
                        sig9(out.min_gap),
                        sig9(min_gap),
                        out.counterexamples,
                    );
                    let pass = out.passed();
                    println!("verify: lemma1: {}", if pass { "PASS" } else { "FAIL" });
                    if pass {
                        0
                    } else {
                        EXIT_CAMPAIGN_FAIL
                    }
                }
                Err(e) => fail(EXIT_INPUT, &e.to_string()),
            }
        }
        "theorem2-grid" => {
            let n = args.trials.unwrap_or(17);
            let tol = args.tol.unwrap_or(1e-4);
            if n < 2 {
                return fail(EXIT_INPUT, "grid side must be at least 2");
            }
            match theorem2_grid_campaign(n, args.seed, tol, &budget, None) {
                Ok(out) => {
                    println!(
                        "verify: theorem2-grid: {n}x{n} grid, worst |discord + S(a|b)| {} (tol {}), separability-iff {}, complementary-state separability {}",
                        sig9(out.worst_discord_dev),
                        sig9(tol),
                        out.separability_iff_ok,
                        out.hypothesis_ok,
                    );
                    let pass = out.passed();
                    println!(
                        "verify: theorem2-grid: {}",
                        if pass { "PASS" } else { "FAIL" }
                    );
                    if pass {
                        0
                    } else {
                        EXIT_CAMPAIGN_FAIL
                    }
                }
                Err(e) => fail(EXIT_INPUT, &e.to_string()),
            }
        }
        "chain" => {
            let trials = args.trials.unwrap_or(1000);
            let ree_budget = ReeBudget {
                restarts: 1,
                max_iters: 50,
                seed: args.seed,
                ..ReeBudget::default()
            };
            match chain_campaign(trials, args.seed, &ree_budget) {
                Ok(out) => {
                    println!(
                        "verify: chain: {} reports, violations {}{}",
                        out.trials,
                        out.violations,
                        out.first_violation
                            .as_deref()
                            .map(|v| format!("; first: {v}"))
                            .unwrap_or_default(),
                    );
                    let pass = out.passed();
                    println!("verify: chain: {}", if pass { "PASS" } else { "FAIL" });
                    if pass {
                        0
                    } else {
                        EXIT_CAMPAIGN_FAIL
                    }
                }
                Err(e) => fail(EXIT_INPUT, &e.to_string()),
            }
        }
        other => fail(EXIT_INPUT, &format!("unknown campaign: {other}")),
    }
}
