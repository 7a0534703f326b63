//! Implementations of the five subcommands. Each one prints a
//! line-oriented `key=value` report to standard output; the file-writing
//! commands also produce their artifact plus a manifest, both written
//! atomically.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use qnetcode::circuits::ResourceKind;
use qnetcode::correlations::{
    bell_diagonal, discord_closed_form, discord_with, ppt_separable, BellDiagonalParams,
    DEFAULT_DISCORD_GRID, DEFAULT_DISCORD_REFINE,
};
use qnetcode::discord_teleport::{
    run_butterfly_discord, sweep_fidelity, sweep_fidelity_axes, BlochState, FidelitySurface,
    DEFAULT_SWEEP_STEPS,
};
use qnetcode::network::Permutation;
use qnetcode::protocols::{run_kpair, ProtocolConfig, ProtocolResult, RoutingMode, SampleCount};

use crate::manifest::RunManifest;
use crate::output::{fmt_float, write_atomic};

/// Errors surfaced to the user, split by exit code: bad input (1) versus
/// a physicality refusal (2).
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Physicality(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Physicality(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Physicality(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<qnetcode::Error> for CliError {
    fn from(e: qnetcode::Error) -> Self {
        match &e {
            qnetcode::Error::Unphysical { .. } => CliError::Physicality(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(format!("i/o error: {e}"))
    }
}

pub type CliResult = Result<(), CliError>;

/// Input-file row: one Bloch-sphere input per sender, angles in radians.
#[derive(Debug, Deserialize)]
struct AngleSpec {
    theta: f64,
    phi: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Number of sender-target pairs.
    #[arg(long)]
    k: usize,
    /// Entangled resource: epr, ghz, or w.
    #[arg(long, default_value = "epr")]
    resource: String,
    /// Target placement: identity, cyclic, swap, or a 1-based list like
    /// "2,3,1".
    #[arg(long, default_value = "cyclic")]
    perm: String,
    /// Routing mode: coded or passthrough.
    #[arg(long, default_value = "coded")]
    mode: String,
    /// JSON file with one {"theta": .., "phi": ..} object per sender
    /// (radians).
    #[arg(long)]
    inputs: PathBuf,
    /// Result file path.
    #[arg(long, default_value = "result.json")]
    out: PathBuf,
    /// Draw this many outcome samples from the exact branch distribution.
    #[arg(long)]
    sample: Option<u64>,
    /// Seed for the sample draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn draw_samples(result: &ProtocolResult, n: u64, seed: u64) -> Vec<SampleCount> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..n {
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        let mut chosen = result.branches.last().expect("at least one branch");
        for branch in &result.branches {
            cum += branch.probability;
            if u < cum {
                chosen = branch;
                break;
            }
        }
        let key: String = chosen.outcome.iter().map(|b| char::from(b'0' + b)).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(outcome, count)| SampleCount { outcome, count })
        .collect()
}

pub fn cmd_run(args: &RunArgs) -> CliResult {
    let raw = std::fs::read(&args.inputs).map_err(|e| {
        CliError::Input(format!("cannot read {}: {e}", args.inputs.display()))
    })?;
    let specs: Vec<AngleSpec> = serde_json::from_slice(&raw)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.inputs.display())))?;
    let inputs = specs
        .iter()
        .map(|s| BlochState::new(s.theta, s.phi).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let resource: ResourceKind = args.resource.parse()?;
    let mode: RoutingMode = args.mode.parse()?;
    let perm = Permutation::parse(&args.perm, args.k)?;
    let config = ProtocolConfig {
        k: args.k,
        resource,
        perm,
        mode,
        inputs,
    };
    let result = run_kpair(&config)?;
    let samples = args.sample.map(|n| draw_samples(&result, n, args.seed));
    let body = result.to_json_with_samples(samples.as_deref());
    write_atomic(&args.out, body.as_bytes())?;

    let mut params = BTreeMap::new();
    params.insert("k".to_string(), args.k.to_string());
    params.insert("resource".to_string(), args.resource.clone());
    params.insert("perm".to_string(), args.perm.clone());
    params.insert("mode".to_string(), args.mode.clone());
    params.insert("inputs".to_string(), args.inputs.display().to_string());
    params.insert("out".to_string(), args.out.display().to_string());
    params.insert(
        "sample".to_string(),
        args.sample.map_or("none".to_string(), |n| n.to_string()),
    );
    params.insert("seed".to_string(), args.seed.to_string());
    let manifest = RunManifest::new("run", params).with_input_bytes(&raw);
    let manifest_path = manifest.write_alongside(&args.out)?;

    println!("k={}", args.k);
    println!("resource={}", resource.name());
    println!("mode={}", args.mode);
    for (j, f) in result.per_target_fidelity.iter().enumerate() {
        println!("fidelity_t{}={}", j + 1, fmt_float(*f));
    }
    println!("bottleneck_bits={}", result.bottleneck_bits);
    println!("branch_count={}", result.branch_count);
    if let Some(samples) = &samples {
        let total: u64 = samples.iter().map(|s| s.count).sum();
        println!("samples={total}");
    }
    println!("out={}", args.out.display());
    println!("manifest={}", manifest_path.display());
    Ok(())
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Inclusive polar-angle grid size over [0, pi]; at least 2.
    #[arg(long, default_value_t = DEFAULT_SWEEP_STEPS)]
    theta_steps: usize,
    /// Inclusive azimuth grid size over [0, 2 pi]; at least 2, or exactly
    /// 1 together with --phi for a single row.
    #[arg(long, default_value_t = DEFAULT_SWEEP_STEPS)]
    phi_steps: usize,
    /// Azimuth (radians) of the single row when --phi-steps is 1.
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Channel setting of the one-parameter family; 0 is the only
    /// physical member.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c3: f64,
    /// CSV output path.
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
    /// Evaluate the formal (unphysical) family members instead of
    /// refusing.
    #[arg(long)]
    allow_unphysical: bool,
}

pub fn cmd_sweep(args: &SweepArgs) -> CliResult {
    let params = BellDiagonalParams::new(1.0, args.c3, args.c3)?;
    if !params.is_physical() && !args.allow_unphysical {
        return Err(CliError::Physicality(format!(
            "the channel with c3 = {} is not a physical state (smallest eigenvalue {:.3}); \
             pass --allow-unphysical to evaluate the formal family",
            args.c3,
            params.min_weight()
        )));
    }
    let surface: FidelitySurface = match (args.phi_steps, args.phi) {
        (1, Some(phi)) => {
            if args.theta_steps < 2 {
                return Err(CliError::Input(format!(
                    "--theta-steps must be at least 2, got {}",
                    args.theta_steps
                )));
            }
            let n = args.theta_steps;
            let theta_axis: Vec<f64> = (0..n)
                .map(|i| std::f64::consts::PI * i as f64 / (n - 1) as f64)
                .collect();
            sweep_fidelity_axes(&theta_axis, &[phi], args.c3)?
        }
        (1, None) => {
            return Err(CliError::Input(
                "--phi is required when --phi-steps is 1".to_string(),
            ));
        }
        (_, Some(_)) => {
            return Err(CliError::Input(
                "--phi only applies when --phi-steps is 1".to_string(),
            ));
        }
        (_, None) => sweep_fidelity(args.theta_steps, args.phi_steps, args.c3)?,
    };
    write_atomic(&args.out, surface.to_csv().as_bytes())?;

    let mut params_map = BTreeMap::new();
    params_map.insert("theta_steps".to_string(), args.theta_steps.to_string());
    params_map.insert("phi_steps".to_string(), args.phi_steps.to_string());
    params_map.insert(
        "phi".to_string(),
        args.phi.map_or("none".to_string(), |p| fmt_float(p)),
    );
    params_map.insert("c3".to_string(), fmt_float(args.c3));
    params_map.insert("out".to_string(), args.out.display().to_string());
    params_map.insert(
        "allow_unphysical".to_string(),
        args.allow_unphysical.to_string(),
    );
    let manifest = RunManifest::new("sweep", params_map);
    let manifest_path = manifest.write_alongside(&args.out)?;

    let best = surface.max_cell();
    println!(
        "rows={}",
        surface.theta_axis().len() * surface.phi_axis().len()
    );
    println!("c3={}", fmt_float(surface.c3()));
    println!("physical={}", surface.is_physical());
    println!("max_fidelity={}", fmt_float(best.fidelity));
    println!("argmax_theta={}", fmt_float(best.theta));
    println!("argmax_phi={}", fmt_float(best.phi));
    println!("max_formula_gap={}", fmt_float(surface.max_abs_diff()));
    println!("out={}", args.out.display());
    println!("manifest={}", manifest_path.display());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiscordMethod {
    /// Run the measurement minimizer and the closed form, and compare.
    Both,
    /// Grid-plus-refinement minimization over measurement axes.
    Minimize,
    /// Closed-form Bell-diagonal expressions only.
    Closed,
}

#[derive(Debug, Args)]
pub struct DiscordArgs {
    #[arg(long, allow_negative_numbers = true)]
    c1: f64,
    #[arg(long, allow_negative_numbers = true)]
    c2: f64,
    #[arg(long, allow_negative_numbers = true)]
    c3: f64,
    #[arg(long, value_enum, default_value_t = DiscordMethod::Both)]
    method: DiscordMethod,
    /// Polar grid size for the minimizer.
    #[arg(long, default_value_t = DEFAULT_DISCORD_GRID)]
    grid: usize,
    /// Pattern-search step tolerance for the minimizer.
    #[arg(long, default_value_t = DEFAULT_DISCORD_REFINE)]
    refine: f64,
}

pub fn cmd_discord(args: &DiscordArgs) -> CliResult {
    let params = BellDiagonalParams::new(args.c1, args.c2, args.c3)?;
    let rho = bell_diagonal(&params);
    // Both computation paths refuse unphysical parameter points with the
    // physicality exit code; nothing is printed for them.
    let closed = match args.method {
        DiscordMethod::Minimize => None,
        _ => Some(discord_closed_form(&params)?),
    };
    let minimized = match args.method {
        DiscordMethod::Closed => None,
        _ => Some(discord_with(&rho, args.grid, args.refine)?),
    };
    println!("c1={}", fmt_float(args.c1));
    println!("c2={}", fmt_float(args.c2));
    println!("c3={}", fmt_float(args.c3));
    println!("physical={}", params.is_physical());
    match args.method {
        DiscordMethod::Both => println!("method=both"),
        DiscordMethod::Minimize => println!("method=minimize"),
        DiscordMethod::Closed => println!("method=closed"),
    }
    if let Some(report) = &minimized {
        println!("mutual_information={}", fmt_float(report.mutual_information));
        println!(
            "classical_correlation={}",
            fmt_float(report.classical_correlation)
        );
        println!("discord={}", fmt_float(report.discord));
        println!("argmin_theta={}", fmt_float(report.argmin_axis.theta));
        println!("argmin_phi={}", fmt_float(report.argmin_axis.phi));
    }
    if let Some((i, j, d)) = closed {
        let prefix = if minimized.is_some() { "closed_" } else { "" };
        println!("{prefix}mutual_information={}", fmt_float(i));
        println!("{prefix}classical_correlation={}", fmt_float(j));
        println!("{prefix}discord={}", fmt_float(d));
    }
    if let (Some(report), Some((_, _, d_closed))) = (&minimized, closed) {
        let gap = (report.discord - d_closed).abs();
        println!("discord_disagreement={}", fmt_float(gap));
        if gap > 1e-4 {
            eprintln!(
                "warning: minimizer and closed form disagree by {gap:.3e}; \
                 consider a finer --grid"
            );
        }
    }
    println!("ppt_separable={}", ppt_separable(&rho)?);
    Ok(())
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, allow_negative_numbers = true)]
    c1: f64,
    #[arg(long, allow_negative_numbers = true)]
    c2: f64,
    #[arg(long, allow_negative_numbers = true)]
    c3: f64,
}

pub fn cmd_validate(args: &ValidateArgs) -> CliResult {
    let params = BellDiagonalParams::new(args.c1, args.c2, args.c3)?;
    let rho = bell_diagonal(&params);
    let physical = rho.is_physical();
    println!("c1={}", fmt_float(args.c1));
    println!("c2={}", fmt_float(args.c2));
    println!("c3={}", fmt_float(args.c3));
    println!("physical={physical}");
    println!("min_eigenvalue={}", fmt_float(rho.min_eigenvalue()));
    if physical {
        println!("ppt_separable={}", ppt_separable(&rho)?);
    } else {
        // Separability is a property of states; a non-positive operator
        // has no verdict.
        println!("ppt_separable=undefined");
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct ButterflyArgs {
    /// Polar angle of sender 1's message (radians).
    #[arg(long, allow_negative_numbers = true)]
    theta1: f64,
    /// Azimuth of sender 1's message (radians).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi1: f64,
    /// Polar angle of sender 2's message (radians).
    #[arg(long, allow_negative_numbers = true)]
    theta2: f64,
    /// Azimuth of sender 2's message (radians).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi2: f64,
    /// Channel for pair 1 as "c1,c2,c3".
    #[arg(long, default_value = "1,0,0")]
    ch1: String,
    /// Channel for pair 2 as "c1,c2,c3".
    #[arg(long, default_value = "1,0,0")]
    ch2: String,
    /// Evaluate unphysical channel operators instead of refusing.
    #[arg(long)]
    allow_unphysical: bool,
    /// Result file path.
    #[arg(long, default_value = "butterfly.json")]
    out: PathBuf,
}

fn parse_channel(text: &str, flag: &str) -> Result<BellDiagonalParams, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!(
            "--{flag} expects \"c1,c2,c3\", got \"{text}\""
        )));
    }
    let mut c = [0.0f64; 3];
    for (slot, part) in c.iter_mut().zip(&parts) {
        *slot = part.parse::<f64>().map_err(|_| {
            CliError::Input(format!("--{flag}: cannot parse \"{part}\" as a number"))
        })?;
    }
    Ok(BellDiagonalParams::new(c[0], c[1], c[2])?)
}

pub fn cmd_butterfly(args: &ButterflyArgs) -> CliResult {
    let in1 = BlochState::new(args.theta1, args.phi1)?;
    let in2 = BlochState::new(args.theta2, args.phi2)?;
    let ch1 = parse_channel(&args.ch1, "ch1")?;
    let ch2 = parse_channel(&args.ch2, "ch2")?;
    for (flag, ch) in [("ch1", &ch1), ("ch2", &ch2)] {
        if !ch.is_physical() && !args.allow_unphysical {
            return Err(CliError::Physicality(format!(
                "--{flag} is not a physical state (smallest eigenvalue {:.3}); \
                 pass --allow-unphysical to evaluate it formally",
                ch.min_weight()
            )));
        }
    }
    let outcome = run_butterfly_discord(&in1, &in2, &ch1, &ch2)?;

    let ledger = serde_json::to_string(&outcome.traffic.records).expect("ledger serializes");
    let body = format!(
        "{{\n  \"fidelity\": [{}, {}],\n  \"physical\": [{}, {}],\n  \
         \"bottleneck_bits\": {},\n  \"ledger\": {}\n}}\n",
        fmt_float(outcome.fidelity[0]),
        fmt_float(outcome.fidelity[1]),
        outcome.physical[0],
        outcome.physical[1],
        outcome.bottleneck_bits,
        ledger
    );
    write_atomic(&args.out, body.as_bytes())?;

    let mut params = BTreeMap::new();
    params.insert("theta1".to_string(), fmt_float(args.theta1));
    params.insert("phi1".to_string(), fmt_float(args.phi1));
    params.insert("theta2".to_string(), fmt_float(args.theta2));
    params.insert("phi2".to_string(), fmt_float(args.phi2));
    params.insert("ch1".to_string(), args.ch1.clone());
    params.insert("ch2".to_string(), args.ch2.clone());
    params.insert(
        "allow_unphysical".to_string(),
        args.allow_unphysical.to_string(),
    );
    params.insert("out".to_string(), args.out.display().to_string());
    let manifest = RunManifest::new("butterfly-discord", params);
    let manifest_path = manifest.write_alongside(&args.out)?;

    println!("fidelity_t1={}", fmt_float(outcome.fidelity[0]));
    println!("fidelity_t2={}", fmt_float(outcome.fidelity[1]));
    println!("bottleneck_bits={}", outcome.bottleneck_bits);
    println!("physical_ch1={}", outcome.physical[0]);
    println!("physical_ch2={}", outcome.physical[1]);
    println!("out={}", args.out.display());
    println!("manifest={}", manifest_path.display());
    Ok(())
}
