//! Re-measures the quantities behind the frozen constants in `paraprod::calibration`.
//!
//! Pairs 0..100 per depth 2..=8 (seeds 2p and 2p+1, complex normal, default gamma),
//! then the log-type family for depths 2..=10.
//!
//! `cargo run --release --example calibrate`

use paraprod::calibration::{HEADROOM, KAPPA, KAPPA_PRIME, RATIO_WINDOW};
use paraprod::campaign::{bmo_ratio, carleson_ratio, random_pair};
use paraprod::conditions::full_report;
use paraprod::symbols::{generate, Distribution, SymbolKind, DEFAULT_GAMMA};
use rayon::prelude::*;

const PAIRS: u64 = 100;

struct Cell {
    depth: u32,
    ratio: f64,
    kappa: f64,
    kappa_prime: f64,
}

fn max(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn min(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::INFINITY, f64::min)
}

fn main() {
    let grid: Vec<(u32, u64)> = (2..=8)
        .flat_map(|d| (0..PAIRS).map(move |p| (d, p)))
        .collect();
    let cells: Vec<Cell> = grid
        .par_iter()
        .map(|&(depth, p)| {
            let (b, d) = random_pair(p, depth, DEFAULT_GAMMA, Distribution::ComplexNormal);
            let r = full_report(&b, &d).expect("report");
            Cell {
                depth,
                ratio: r.op_norm / r.abc(),
                kappa: bmo_ratio(&r),
                kappa_prime: carleson_ratio(&b),
            }
        })
        .collect();

    for depth in 2..=8 {
        let row = || cells.iter().filter(move |c| c.depth == depth);
        println!(
            "D={depth} ratio=[{:.4}, {:.4}] kappa={:.4} kappa'={:.4}",
            min(row().map(|c| c.ratio)),
            max(row().map(|c| c.ratio)),
            max(row().map(|c| c.kappa)),
            max(row().map(|c| c.kappa_prime)),
        );
    }
    let window = max(cells.iter().map(|c| c.ratio)) / min(cells.iter().map(|c| c.ratio));
    let kappa = max(cells.iter().map(|c| c.kappa));
    let kappa_prime = max(cells.iter().map(|c| c.kappa_prime));
    println!("window  {window:.6} (frozen {RATIO_WINDOW}, x{HEADROOM} = {:.4})", window * HEADROOM);
    println!("kappa   {kappa:.6} (frozen {KAPPA}, x{HEADROOM} = {:.4})", kappa * HEADROOM);
    println!("kappa'  {kappa_prime:.6} (frozen {KAPPA_PRIME}, x{HEADROOM} = {:.4})", kappa_prime * HEADROOM);

    for depth in 2..=10 {
        let s = generate(SymbolKind::LogType, depth);
        let r = full_report(&s, &s).expect("report");
        println!(
            "log D={depth} A={:.4} B={:.4} C={:.4} op={:.4} ratio={:.4} kappa={:.4} kappa'={:.4}",
            r.a,
            r.b,
            r.c,
            r.op_norm,
            r.op_norm / r.abc(),
            bmo_ratio(&r),
            carleson_ratio(&s),
        );
    }
}
