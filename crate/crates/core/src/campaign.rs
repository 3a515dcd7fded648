//! Randomized verification campaigns and the `log`-family depth sweep.
//!
//! Trials are evaluated in parallel; results are aggregated in canonical
//! `(depth, trial)` order so that outputs are byte-identical across runs.

use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration;
use crate::conditions::{
    carleson_difference_bound, full_report, square_function_domination, ConditionsReport,
};
use crate::dyadic::{delta, GridFunction, Tree};
use crate::error::{Error, Result};
use crate::halfplane::{
    forward_testing, forward_testing_closed, inner_qpm_hnu, t_gram_closed, t_gram_direct,
};
use crate::paraproducts::{composition_gram_closed, composition_gram_direct, OperatorMatrix};
use crate::symbols::{generate, nu_table, scale, Distribution, Symbol, SymbolKind, DEFAULT_GAMMA};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Normalized `|closed - direct|` for Gram matrices.
    pub gram: f64,
    /// `|T - 2P|` relative to the largest entry.
    pub transplant: f64,
    /// `A + B + C` at or below this counts as zero.
    pub zero_sum: f64,
    /// `op_norm` at or below this counts as zero.
    pub zero_norm: f64,
    pub homogeneity: f64,
    /// Forward-testing and `c₀` agreement, relative.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            gram: 1e-10,
            transplant: 1e-12,
            zero_sum: 1e-12,
            zero_norm: 1e-10,
            homogeneity: 1e-10,
            identity: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub depths: Vec<u32>,
    pub trials: u32,
    /// Trial `t` uses the pair seeds `pair_seeds(seed + t)`.
    pub seed: u64,
    pub gamma: f64,
    pub distribution: Distribution,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Depth cap for the grid-based Gram oracle and the half-plane checks.
    pub oracle_max_depth: u32,
    /// Depth cap for the forward-testing and `c₀` checks.
    pub identity_max_depth: u32,
    /// Test hook: perturbs the closed-form Gram matrix.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub corrupt_closed: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            depths: (2..=6).collect(),
            trials: 50,
            seed: 0,
            gamma: DEFAULT_GAMMA,
            distribution: Distribution::ComplexNormal,
            tolerances: Tolerances::default(),
            out_dir: None,
            oracle_max_depth: 6,
            identity_max_depth: 5,
            corrupt_closed: false,
        }
    }
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("campaign config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = self.depths.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidParameter(format!(
                "campaign depth {d} < 2: depths 0 and 1 are the trivial-zero regime"
            )));
        }
        if let Some(d) = self.depths.iter().find(|&&d| d > Tree::MAX_DEPTH) {
            return Err(Error::InvalidParameter(format!("depth {d} exceeds {}", Tree::MAX_DEPTH)));
        }
        if !(self.gamma.is_finite()) {
            return Err(Error::InvalidParameter("gamma must be finite".into()));
        }
        Ok(())
    }

    pub fn kind(&self, seed: u64) -> SymbolKind {
        SymbolKind::Random {
            seed,
            gamma: self.gamma,
            distribution: self.distribution,
        }
    }
}

/// Generator seeds `(b, d)` for a pair index.
pub fn pair_seeds(pair: u64) -> (u64, u64) {
    (2 * pair, 2 * pair + 1)
}

/// The random pair `(b, d)` with pair index `pair`.
pub fn random_pair(pair: u64, depth: u32, gamma: f64, distribution: Distribution) -> (Symbol, Symbol) {
    let (sb, sd) = pair_seeds(pair);
    let kind = |seed| SymbolKind::Random {
        seed,
        gamma,
        distribution,
    };
    (generate(kind(sb), depth), generate(kind(sd), depth))
}

/// Largest `lhs / rhs` of the Carleson difference bound over nodes with `rhs > 0`.
pub fn carleson_ratio(b: &Symbol) -> f64 {
    b.tree()
        .nodes()
        .map(|i| carleson_difference_bound(b, i))
        .filter(|(_, rhs)| *rhs > 0.0)
        .map(|(lhs, rhs)| lhs / rhs)
        .fold(0.0, f64::max)
}

/// `(A + B + C) / (‖b‖_BMO ‖d‖_BMO)`, or 0 when either norm vanishes.
pub fn bmo_ratio(r: &ConditionsReport) -> f64 {
    let den = r.bmo_b * r.bmo_d;
    if den > 0.0 {
        r.abc() / den
    } else {
        0.0
    }
}

/// Largest `(SΦ)² - (Mc)² (Sb)²` relative to the right side, over all cells.
pub fn domination_excess(b: &Symbol, c: &GridFunction) -> f64 {
    let (lhs, rhs) = square_function_domination(b, c);
    lhs.iter()
        .zip(&rhs)
        .map(|(l, r)| (l - r) / r.max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// A grid function with the symbol's values laid out on the cells.
pub fn test_grid_function(seed: u64, depth: u32, distribution: Distribution) -> GridFunction {
    let kind = SymbolKind::Random {
        seed,
        gamma: 0.0,
        distribution,
    };
    let values = generate(kind, depth + 1);
    let cells = Tree::new(depth).resolution();
    GridFunction::from_samples(depth, values.values()[..cells].to_vec()).expect("resolution")
}

/// Relative deviation of `Gram` pairs, normalized by the larger entry.
fn rel_diff(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE)
}

/// Range `(min, max)` of `⟨1̃_{Q±(K)}, H_J^ν⟩_ν` over the tabulated case formula.
pub fn qpm_hnu_ratio_range(b: &Symbol) -> Result<Option<(f64, f64)>> {
    let depth = b.depth();
    let nu = nu_table(b);
    let tree = b.tree();
    let mut range: Option<(f64, f64)> = None;
    for j in tree.nodes().filter(|j| j.level < depth) {
        if nu.nu(&j.left_child()) == 0.0 || nu.nu(&j.right_child()) == 0.0 {
            continue;
        }
        for k in tree.strict_descendants(j) {
            let half = j.half_containing(&k).expect("strict descendant");
            let printed = delta(&j, &k)? as f64 / k.len() * nu.nu_tilde(&j)
                / nu.nu_half(&j, half)
                * nu.imbalance(&k);
            if printed.abs() < 1e-9 * nu.nu(&j).max(1.0) {
                continue;
            }
            let r = inner_qpm_hnu(b, k, j)?.re / printed;
            range = Some(match range {
                None => (r, r),
                Some((lo, hi)) => (lo.min(r), hi.max(r)),
            });
        }
    }
    Ok(range)
}

/// Largest `|direct - forward_scale · closed|` over nodes, relative to the largest entry.
pub fn forward_scale_deviation(b: &Symbol, d: &Symbol, forward_scale: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in b.tree().nodes() {
        let (direct, _) = forward_testing(b, d, i)?;
        let closed = forward_testing_closed(d, i).scaled(Complex64::new(forward_scale, 0.0));
        let scale = direct.max_abs().max(closed.max_abs()).max(f64::MIN_POSITIVE);
        worst = worst.max(direct.max_abs_diff(&closed) / scale);
    }
    Ok(worst)
}

/// Everything measured on one `(depth, trial)` cell.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub depth: u32,
    pub trial: u32,
    pub pair: u64,
    pub report: ConditionsReport,
    pub gram_error: Option<f64>,
    pub transplant_error: Option<f64>,
    pub t_direct_error: Option<f64>,
    pub homogeneity_error: f64,
    pub carleson_ratio: f64,
    pub bmo_ratio: f64,
    pub domination_excess: f64,
    pub c0_range: Option<(f64, f64)>,
    pub forward_error: Option<f64>,
}

pub fn evaluate_trial(cfg: &CampaignConfig, depth: u32, trial: u32) -> Result<TrialOutcome> {
    let pair = cfg.seed + trial as u64;
    let (b, d) = random_pair(pair, depth, cfg.gamma, cfg.distribution);
    let mut report = full_report(&b, &d)?;
    report.seed = Some(pair);
    report.b_source = Some(cfg.kind(pair_seeds(pair).0).to_string());
    report.d_source = Some(cfg.kind(pair_seeds(pair).1).to_string());

    let oracle = depth <= cfg.oracle_max_depth;
    let mut closed = None;
    let gram_error = if oracle {
        let mut c = composition_gram_closed(&b, &d)?;
        if cfg.corrupt_closed {
            let bump = Complex64::new(1e-6 * c.max_abs().max(1.0), 0.0);
            c.add_to(c.dim() - 1, 0, bump);
        }
        let e = composition_gram_direct(&b, &d)?.normalized_diff(&c);
        closed = Some(c);
        Some(e)
    } else {
        None
    };
    let (transplant_error, t_direct_error) = match &closed {
        Some(p) => {
            let t = t_gram_closed(&b, &d)?;
            let two_p = p.scaled(Complex64::new(2.0, 0.0));
            (
                Some(rel_diff(&t, &two_p)),
                Some(t_gram_direct(&b, &d)?.normalized_diff(&t)),
            )
        }
        None => (None, None),
    };

    let lam = Complex64::new(2.0, 0.0);
    let mut homogeneity_error = 0.0f64;
    for r in [full_report(&scale(&b, lam), &d)?, full_report(&b, &scale(&d, lam))?] {
        for (x, y) in [
            (r.a, report.a),
            (r.b, report.b),
            (r.c, report.c),
            (r.op_norm, report.op_norm),
        ] {
            let want = lam.norm() * y;
            let err = (x - want).abs();
            if err > 0.0 {
                homogeneity_error = homogeneity_error.max(err / want.abs().max(x.abs()));
            }
        }
    }

    let c = test_grid_function(pair_seeds(pair).1 ^ 0x5eed, depth, cfg.distribution);
    let identity = depth <= cfg.identity_max_depth;
    Ok(TrialOutcome {
        depth,
        trial,
        pair,
        gram_error,
        transplant_error,
        t_direct_error,
        homogeneity_error,
        carleson_ratio: carleson_ratio(&b),
        bmo_ratio: bmo_ratio(&report),
        domination_excess: domination_excess(&b, &c),
        c0_range: if identity { qpm_hnu_ratio_range(&b)? } else { None },
        forward_error: if identity {
            Some(forward_scale_deviation(&b, &d, calibration::FORWARD_SCALE)?)
        } else {
            None
        },
        report,
    })
}

/// Per-invariant verdict with the worst offending cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub name: String,
    pub pass: bool,
    /// Worst measured value and the bound it is compared against.
    pub worst: Option<f64>,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_depth: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrozenConstants {
    pub ratio_window: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
    pub c0: f64,
    pub forward_scale: f64,
}

impl FrozenConstants {
    pub fn current() -> Self {
        Self {
            ratio_window: calibration::RATIO_WINDOW,
            kappa: calibration::KAPPA,
            kappa_prime: calibration::KAPPA_PRIME,
            c0: calibration::QPM_HNU_C0,
            forward_scale: calibration::FORWARD_SCALE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub config: CampaignConfig,
    pub trials_run: usize,
    pub no_data: bool,
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
    pub ratio_spread: Option<f64>,
    pub kappa: Option<f64>,
    pub kappa_prime: Option<f64>,
    pub c0_min: Option<f64>,
    pub c0_max: Option<f64>,
    pub frozen: FrozenConstants,
    pub invariants: Vec<InvariantResult>,
    pub pass: bool,
}

impl CampaignSummary {
    pub fn failing(&self) -> impl Iterator<Item = &InvariantResult> {
        self.invariants.iter().filter(|i| !i.pass)
    }
}

struct Tracker {
    name: &'static str,
    bound: f64,
    worst: Option<(f64, u64, u32)>,
    pass: bool,
}

impl Tracker {
    fn new(name: &'static str, bound: f64) -> Self {
        Self {
            name,
            bound,
            worst: None,
            pass: true,
        }
    }

    /// Records `value`; `ok` decides pass/fail independently of the ordering.
    fn record(&mut self, value: f64, ok: bool, t: &TrialOutcome) {
        if !ok {
            self.pass = false;
        }
        let replace = match self.worst {
            None => true,
            Some((w, ..)) => value > w || value.is_nan(),
        };
        if replace {
            self.worst = Some((value, t.pair, t.depth));
        }
    }

    fn bounded(&mut self, value: f64, t: &TrialOutcome) {
        self.record(value, value <= self.bound, t);
    }

    fn finish(self) -> InvariantResult {
        InvariantResult {
            name: self.name.to_string(),
            pass: self.pass,
            worst: self.worst.map(|w| w.0),
            bound: self.bound,
            worst_seed: self.worst.map(|w| w.1),
            worst_depth: self.worst.map(|w| w.2),
        }
    }
}

pub fn summarize(cfg: &CampaignConfig, outcomes: &[TrialOutcome]) -> CampaignSummary {
    let tol = &cfg.tolerances;
    let frozen = FrozenConstants::current();
    let mut gram = Tracker::new("gram_equivalence", tol.gram);
    let mut transplant = Tracker::new("transplant_identity", tol.transplant);
    let mut t_direct = Tracker::new("transplant_direct", tol.gram);
    let mut zero = Tracker::new("zero_equivalence", tol.zero_norm);
    let mut homog = Tracker::new("homogeneity", tol.homogeneity);
    let mut kappa = Tracker::new("bmo_majorization", frozen.kappa);
    let mut kappa_p = Tracker::new("carleson_difference_bound", frozen.kappa_prime);
    let mut domination = Tracker::new("square_function_domination", 1e-12);
    let mut c0 = Tracker::new("qpm_hnu_constant", tol.identity);
    let mut forward = Tracker::new("forward_testing_scale", tol.identity);
    let mut window = Tracker::new("equivalence_window", frozen.ratio_window);

    let mut ratio: Option<(f64, f64)> = None;
    let mut c0_range: Option<(f64, f64)> = None;
    let (mut lo_cell, mut hi_cell) = (None, None);
    for t in outcomes {
        let r = &t.report;
        if let Some(e) = t.gram_error {
            gram.bounded(e, t);
        }
        if let Some(e) = t.transplant_error {
            transplant.bounded(e, t);
        }
        if let Some(e) = t.t_direct_error {
            t_direct.bounded(e, t);
        }
        let sum_zero = r.abc() <= tol.zero_sum;
        let norm_zero = r.op_norm <= tol.zero_norm;
        zero.record(if sum_zero { r.op_norm } else { 0.0 }, sum_zero == norm_zero, t);
        homog.bounded(t.homogeneity_error, t);
        kappa.bounded(t.bmo_ratio, t);
        kappa_p.bounded(t.carleson_ratio, t);
        domination.bounded(t.domination_excess, t);
        if let Some((lo, hi)) = t.c0_range {
            let dev = (lo - frozen.c0).abs().max((hi - frozen.c0).abs()) / frozen.c0;
            c0.bounded(dev, t);
            c0_range = Some(match c0_range {
                None => (lo, hi),
                Some((a, b)) => (a.min(lo), b.max(hi)),
            });
        }
        if let Some(e) = t.forward_error {
            forward.bounded(e, t);
        }
        if !sum_zero {
            let v = r.op_norm / r.abc();
            let (lo, hi) = ratio.unwrap_or((v, v));
            if v <= lo {
                lo_cell = Some(t);
            }
            if v >= hi {
                hi_cell = Some(t);
            }
            ratio = Some((lo.min(v), hi.max(v)));
        }
    }
    let spread = ratio.map(|(lo, hi)| if lo > 0.0 { hi / lo } else { f64::INFINITY });
    if let (Some(s), Some(cell)) = (spread, hi_cell.or(lo_cell)) {
        window.record(s, s <= frozen.ratio_window && ratio.is_some_and(|r| r.0 > 0.0), cell);
    }

    let invariants: Vec<InvariantResult> = [
        gram, transplant, t_direct, zero, homog, window, kappa, kappa_p, domination, c0, forward,
    ]
    .into_iter()
    .map(Tracker::finish)
    .collect();
    let pass = invariants.iter().all(|i| i.pass);
    let max_of = |f: fn(&TrialOutcome) -> f64| {
        outcomes.iter().map(f).fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
    };
    CampaignSummary {
        config: cfg.clone(),
        trials_run: outcomes.len(),
        no_data: outcomes.is_empty(),
        ratio_min: ratio.map(|r| r.0),
        ratio_max: ratio.map(|r| r.1),
        ratio_spread: spread,
        kappa: max_of(|t| t.bmo_ratio),
        kappa_prime: max_of(|t| t.carleson_ratio),
        c0_min: c0_range.map(|r| r.0),
        c0_max: c0_range.map(|r| r.1),
        frozen,
        invariants,
        pass,
    }
}

pub fn run_trials(cfg: &CampaignConfig) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    let cells: Vec<(u32, u32)> = cfg
        .depths
        .iter()
        .flat_map(|&d| (0..cfg.trials).map(move |t| (d, t)))
        .collect();
    cells
        .par_iter()
        .map(|&(d, t)| evaluate_trial(cfg, d, t))
        .collect()
}

pub const CAMPAIGN_CSV_HEADER: &str =
    "depth,trial,seed,b_hash,d_hash,A,B,C,bmo_b,bmo_d,op_norm,ratio,witness_A,witness_B,witness_C";

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row per trial, numbers with 17 significant digits.
pub fn campaign_csv(outcomes: &[TrialOutcome]) -> String {
    let mut out = String::from(CAMPAIGN_CSV_HEADER);
    out.push('\n');
    for t in outcomes {
        let r = &t.report;
        let ratio = match r.ratio {
            crate::conditions::Ratio::Finite(v) => fmt_f(v),
            crate::conditions::Ratio::Infinite => "inf".into(),
            crate::conditions::Ratio::Undefined => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            t.depth,
            t.trial,
            t.pair,
            r.b_hash,
            r.d_hash,
            fmt_f(r.a),
            fmt_f(r.b),
            fmt_f(r.c),
            fmt_f(r.bmo_b),
            fmt_f(r.bmo_d),
            fmt_f(r.op_norm),
            ratio,
            r.witness_a,
            r.witness_b,
            r.witness_c
        )
        .unwrap();
    }
    out
}

/// Runs the campaign and returns `(csv, summary)`.
pub fn verify(cfg: &CampaignConfig) -> Result<(String, CampaignSummary)> {
    let outcomes = run_trials(cfg)?;
    Ok((campaign_csv(&outcomes), summarize(cfg, &outcomes)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub depth: u32,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub abc: f64,
    pub op_norm: f64,
    pub ratio: f64,
    pub bmo_product: f64,
}

pub const SWEEP_CSV_HEADER: &str = "D,A,B,C,A+B+C,op_norm,ratio,bmo_b*bmo_d";

/// `b = d = log` at each depth, in the given order.
pub fn sweep(depths: &[u32]) -> Result<Vec<SweepRow>> {
    depths
        .par_iter()
        .map(|&depth| {
            let s = generate(SymbolKind::LogType, depth);
            let r = full_report(&s, &s)?;
            Ok(SweepRow {
                depth,
                a: r.a,
                b: r.b,
                c: r.c,
                abc: r.abc(),
                op_norm: r.op_norm,
                ratio: r.ratio.finite().unwrap_or(0.0),
                bmo_product: r.bmo_b * r.bmo_d,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.depth,
            fmt_f(r.a),
            fmt_f(r.b),
            fmt_f(r.c),
            fmt_f(r.abc),
            fmt_f(r.op_norm),
            fmt_f(r.ratio),
            fmt_f(r.bmo_product)
        )
        .unwrap();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepChecks {
    /// `op_norm` strictly increasing along increasing depths.
    pub op_norm_increasing: bool,
    /// `max ratio / min ratio`.
    pub ratio_spread: f64,
    pub within_window: bool,
}

pub fn sweep_checks(rows: &[SweepRow]) -> SweepChecks {
    let mut sorted: Vec<&SweepRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.depth);
    let op_norm_increasing = sorted
        .windows(2)
        .all(|w| w[0].depth == w[1].depth || w[1].op_norm > w[0].op_norm);
    let positive: Vec<f64> = rows.iter().map(|r| r.ratio).filter(|r| *r > 0.0).collect();
    let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = positive.iter().copied().fold(0.0, f64::max);
    let ratio_spread = if positive.is_empty() { 1.0 } else { hi / lo };
    SweepChecks {
        op_norm_increasing,
        ratio_spread,
        within_window: ratio_spread <= calibration::RATIO_WINDOW,
    }
}
