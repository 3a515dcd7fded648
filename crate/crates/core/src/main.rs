use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use paraprod::campaign::{self, CampaignConfig};
use paraprod::conditions::full_report;
use paraprod::halfplane::{t_gram_closed, t_gram_direct};
use paraprod::paraproducts::{composition_gram_closed, composition_gram_direct};
use paraprod::symbols::{Distribution, Symbol, SymbolSpec};
use paraprod::Tree;

/// Exit codes: 0 success, 1 usage or I/O error, 2 verification failure.
#[derive(Parser)]
#[command(name = "paraprod", version, about = "Dyadic paraproduct compositions and their testing constants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the four Gram matrices and check closed forms against direct assembly.
    Gram(PairArgs),
    /// Compute A, B, C, the BMO norms and the operator norm for one pair.
    Conditions(PairArgs),
    /// Run a randomized verification campaign.
    Verify(VerifyArgs),
    /// Depth sweep for b = d = log.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct PairArgs {
    /// Tree depth; may be omitted when a symbol comes from a file.
    #[arg(long)]
    depth: Option<u32>,
    /// zero | const:<c> | log | random[:seed=<n>][,gamma=<g>][,dist=<name>] | file:<path>
    #[arg(long, default_value = "random")]
    b: String,
    #[arg(long, default_value = "random")]
    d: String,
    /// Default seed for `random` descriptors without one; `d` uses seed + 1.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "paraprod-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Embed a generation timestamp in JSON output.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON campaign config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Depth list such as `2-6` or `2,3,5`.
    #[arg(long, value_parser = parse_depths)]
    depths: Option<DepthList>,
    /// Random pairs per depth.
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Decay exponent of random symbols.
    #[arg(long)]
    gamma: Option<f64>,
    /// complex_normal | real_normal | uniform
    #[arg(long)]
    dist: Option<String>,
    /// Gram-equivalence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    timestamp: bool,
    /// Perturb the closed-form Gram matrix (exercises the failure path).
    #[arg(long, hide = true)]
    corrupt_closed: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_depths, default_value = "2-8")]
    depths: DepthList,
    #[arg(long, default_value = "paraprod-out")]
    out: PathBuf,
}

#[derive(Clone, Debug)]
struct DepthList(Vec<u32>);

fn parse_depths(s: &str) -> Result<DepthList, String> {
    let err = |_| format!("bad depth list {s:?}");
    let out: Vec<u32> = if let Some((a, b)) = s.split_once('-') {
        let (a, b): (u32, u32) = (a.trim().parse().map_err(err)?, b.trim().parse().map_err(err)?);
        if a > b {
            return Err(format!("empty depth range {s:?}"));
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(err))
            .collect::<Result<_, _>>()?
    };
    if let Some(d) = out.iter().find(|&&d| d > Tree::MAX_DEPTH) {
        return Err(format!("depth {d} exceeds {}", Tree::MAX_DEPTH));
    }
    Ok(DepthList(out))
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Gram(a) => cmd_gram(&a),
        Command::Conditions(a) => cmd_conditions(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

struct Pair {
    b: Symbol,
    d: Symbol,
    b_spec: SymbolSpec,
    d_spec: SymbolSpec,
}

fn load_pair(a: &PairArgs) -> Result<Pair> {
    let b_spec = SymbolSpec::parse(&a.b, a.seed)?;
    let d_spec = SymbolSpec::parse(&a.d, a.seed.wrapping_add(1))?;
    let depth = match (a.depth, b_spec.file_depth()?, d_spec.file_depth()?) {
        (Some(d), ..) => d,
        (None, Some(d), _) | (None, None, Some(d)) => d,
        (None, None, None) => bail!("--depth is required unless a symbol comes from a file"),
    };
    if depth > Tree::MAX_DEPTH {
        bail!("depth {depth} exceeds {}", Tree::MAX_DEPTH);
    }
    let b = b_spec.resolve(depth).with_context(|| format!("--b {}", a.b))?;
    let d = d_spec.resolve(depth).with_context(|| format!("--d {}", a.d))?;
    Ok(Pair {
        b,
        d,
        b_spec,
        d_spec,
    })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn unix_seconds() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn to_json(value: &impl serde::Serialize, timestamp: bool) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    if timestamp {
        if let Some(obj) = v.as_object_mut() {
            obj.insert("generated_at_unix".into(), unix_seconds().into());
        }
    }
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    Ok(text)
}

fn cmd_gram(a: &PairArgs) -> Result<Outcome> {
    let p = load_pair(a)?;
    let pc = composition_gram_closed(&p.b, &p.d)?;
    let pd = composition_gram_direct(&p.b, &p.d)?;
    let tc = t_gram_closed(&p.b, &p.d)?;
    let td = t_gram_direct(&p.b, &p.d)?;
    ensure_dir(&a.out)?;
    for (name, m) in [
        ("composition_gram_closed", &pc),
        ("composition_gram_direct", &pd),
        ("t_gram_closed", &tc),
        ("t_gram_direct", &td),
    ] {
        write(&a.out.join(format!("{name}.csv")), &m.to_csv())?;
    }
    let two_p = pc.scaled(2.0.into());
    let checks = [
        ("composition_gram |closed - direct|", pc.max_abs_diff(&pd)),
        ("t_gram |closed - direct|", tc.max_abs_diff(&td)),
        ("|T - 2P|", tc.max_abs_diff(&two_p)),
    ];
    let mut ok = true;
    for (label, v) in checks {
        let pass = v <= a.tol;
        ok &= pass;
        println!("{label}: {v:.3e} {}", if pass { "ok" } else { "FAIL" });
    }
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_conditions(a: &PairArgs) -> Result<Outcome> {
    let p = load_pair(a)?;
    let mut report = full_report(&p.b, &p.d)?;
    report.seed = p.b_spec.seed().or(p.d_spec.seed()).or(Some(a.seed));
    report.b_source = Some(p.b_spec.to_string());
    report.d_source = Some(p.d_spec.to_string());
    let text = to_json(&report, a.timestamp)?;
    print!("{text}");
    ensure_dir(&a.out)?;
    write(&a.out.join("conditions.json"), &text)?;
    Ok(Outcome::Pass)
}

fn campaign_config(a: &VerifyArgs) -> Result<CampaignConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            CampaignConfig::from_json(&text)?
        }
        None => CampaignConfig::default(),
    };
    if let Some(d) = &a.depths {
        cfg.depths = d.0.clone();
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(g) = a.gamma {
        cfg.gamma = g;
    }
    if let Some(d) = &a.dist {
        cfg.distribution = d.parse::<Distribution>()?;
    }
    if let Some(t) = a.tol {
        cfg.tolerances.gram = t;
    }
    if let Some(o) = &a.out {
        cfg.out_dir = Some(o.clone());
    }
    cfg.corrupt_closed |= a.corrupt_closed;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let cfg = campaign_config(a)?;
    let (csv, summary) = campaign::verify(&cfg)?;
    let out = cfg
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("paraprod-out"));
    ensure_dir(&out)?;
    write(&out.join("campaign.csv"), &csv)?;
    write(&out.join("summary.json"), &to_json(&summary, a.timestamp)?)?;
    if summary.no_data {
        println!("no data: campaign has no trials");
    }
    for inv in &summary.invariants {
        let worst = inv.worst.map_or("-".to_string(), |w| format!("{w:.3e}"));
        print!("{}: {} (worst {worst}, bound {:.3e}", inv.name, verdict(inv.pass), inv.bound);
        if !inv.pass {
            if let (Some(s), Some(d)) = (inv.worst_seed, inv.worst_depth) {
                print!(", seed {s}, depth {d}");
            }
        }
        println!(")");
    }
    if let (Some(lo), Some(hi)) = (summary.ratio_min, summary.ratio_max) {
        println!("ratio op_norm/(A+B+C) in [{lo:.6}, {hi:.6}]");
    }
    Ok(if summary.pass { Outcome::Pass } else { Outcome::Fail })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<Outcome> {
    let rows = campaign::sweep(&a.depths.0)?;
    let csv = campaign::sweep_csv(&rows);
    print!("{csv}");
    ensure_dir(&a.out)?;
    write(&a.out.join("sweep.csv"), &csv)?;
    let checks = campaign::sweep_checks(&rows);
    println!("op_norm increasing in depth: {}", verdict(checks.op_norm_increasing));
    println!(
        "ratio spread {:.6} within window {}: {}",
        checks.ratio_spread,
        paraprod::calibration::RATIO_WINDOW,
        verdict(checks.within_window)
    );
    Ok(if checks.op_norm_increasing && checks.within_window {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}
