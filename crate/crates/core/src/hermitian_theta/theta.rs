use serde::Serialize;

use super::{HermitianLattice, ThetaError};
use crate::exact_linalg::{GramForm, ShortVectors};
use crate::exec::Exec;
use crate::lattice_builder::verify_even_unimodular;

/// `c_0..c_B` with `c_m = #{x : b(x, x) = 2m}`.
pub fn theta_genus1(hl: &HermitianLattice, bound: usize, exec: Exec) -> Result<Vec<u64>, ThetaError> {
    let sv = hl.short_vectors()?;
    theta_from(&sv, bound, exec)
}

fn theta_from(sv: &ShortVectors, bound: usize, exec: Exec) -> Result<Vec<u64>, ThetaError> {
    let counts = sv.count_by_norm(2 * bound as i128, exec)?;
    let mut c: Vec<u64> = (0..=bound).map(|m| counts[2 * m]).collect();
    c[0] = 1;
    Ok(c)
}

/// Outcome of the genus-1 transformation check `θ(i/y) = y^w·θ(iy)`.
#[derive(Clone, Debug, Serialize)]
pub struct TransformReport {
    pub weight: u32,
    pub coefficient_bound: usize,
    pub per_y: Vec<TransformPoint>,
    /// Largest certified relative error.
    pub max_relative_error: f64,
    pub target_precision: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformPoint {
    pub y: f64,
    pub theta_inv: f64,
    pub theta_scaled: f64,
    /// Computed relative difference of the truncated series.
    pub relative_error: f64,
    /// Upper bound on the truncation tails relative to `θ(i/y)`.
    pub tail_bound: f64,
}

/// Upper bound for `Σ_{m>B} c_m e^{−2πmt}` from `#{x : b(x,x) ≤ r} ≤ (1 + 2√(r/μ))^n`,
/// `μ` the minimum; `None` if the ratio test does not yet apply at `B`.
fn tail(bound: usize, t: f64, mu: f64, n: usize) -> Option<f64> {
    let shell = |m: f64| (1.0 + 2.0 * (2.0 * m / mu).sqrt()).powi(n as i32) * (-2.0 * std::f64::consts::PI * m * t).exp();
    let m0 = bound as f64 + 1.0;
    let ratio = shell(m0 + 1.0) / shell(m0);
    (ratio < 1.0).then(|| shell(m0) / (1.0 - ratio))
}

fn eval(c: &[u64], t: f64) -> f64 {
    // ascending magnitude for accuracy
    c.iter().enumerate().rev().map(|(m, &cm)| cm as f64 * (-2.0 * std::f64::consts::PI * m as f64 * t).exp()).sum()
}

/// Compares `θ(i/y)` with `y^w·θ(iy)`, `w = rank/2` unless overridden, choosing the
/// smallest coefficient bound `≤ max_bound` whose certified tails are below a thousandth
/// of `target`.
pub fn transform_check_genus1(
    hl: &HermitianLattice,
    ys: &[f64],
    target: f64,
    max_bound: usize,
    weight_override: Option<u32>,
    exec: Exec,
) -> Result<TransformReport, ThetaError> {
    let n = hl.dim();
    let weight = weight_override.unwrap_or((n / 2) as u32);
    let sv = hl.short_vectors()?;
    let mu = sv.minimum_scaled()? as f64 / sv.scale().to_string().parse::<f64>().unwrap_or(1.0);
    let t_min = ys.iter().flat_map(|&y| [y, 1.0 / y]).fold(f64::INFINITY, f64::min);
    let budget = target * 1e-3;
    let mut chosen = None;
    let mut best = f64::INFINITY;
    for b in 0..=max_bound {
        if let Some(tb) = tail(b, t_min, mu, n) {
            best = best.min(tb);
            if tb < budget {
                chosen = Some(b);
                break;
            }
        }
    }
    let Some(bound) = chosen else {
        return Err(ThetaError::PrecisionUnreachable { target, bound: max_bound, achievable: best });
    };
    let c = theta_from(&sv, bound, exec)?;
    let mut per_y = Vec::new();
    let mut worst: f64 = 0.0;
    for &y in ys {
        let inv = eval(&c, 1.0 / y);
        let direct = eval(&c, y);
        let scaled = y.powi(weight as i32) * direct;
        // θ ≥ 1, and f64 summation error is far below the tail budget
        let tails = tail(bound, 1.0 / y, mu, n).unwrap_or(f64::INFINITY) + y.powi(weight as i32) * tail(bound, y, mu, n).unwrap_or(f64::INFINITY);
        let rel = (inv - scaled).abs() / inv;
        let tail_rel = tails / inv + 1e-14;
        worst = worst.max(rel + tail_rel);
        per_y.push(TransformPoint { y, theta_inv: inv, theta_scaled: scaled, relative_error: rel, tail_bound: tail_rel });
    }
    Ok(TransformReport { weight, coefficient_bound: bound, per_y, max_relative_error: worst, target_precision: target, pass: worst < target })
}

/// Textbook Cartan matrix of `E8` (Bourbaki numbering).
pub fn e8_cartan_gram() -> Vec<Vec<i64>> {
    let edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
    let mut g = vec![vec![0i64; 8]; 8];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in edges {
        g[a][b] = -1;
        g[b][a] = -1;
    }
    g
}

#[derive(Clone, Debug, Serialize)]
pub struct E8Report {
    pub even_unimodular: bool,
    pub root_count: u64,
    pub reference_root_count: u64,
    pub is_e8: bool,
}

/// A rank-8 even unimodular lattice is `E8`; also compares root counts with the Cartan
/// lattice enumerated by the same engine.
pub fn e8_identify(hl: &HermitianLattice, exec: Exec) -> Result<E8Report, ThetaError> {
    if hl.dim() != 8 {
        return Err(ThetaError::NotApplicable(format!("dimension {} is not 8", hl.dim())));
    }
    let report = verify_even_unimodular(&hl.gram().to_rat().to_rows());
    let root_count = theta_genus1(hl, 1, exec)?[1];
    let reference = ShortVectors::new(&GramForm::from_i64(&e8_cartan_gram())?)?;
    let reference_root_count = theta_from(&reference, 1, exec)?[1];
    let even_unimodular = report.all_pass();
    Ok(E8Report { even_unimodular, root_count, reference_root_count, is_e8: even_unimodular && root_count == reference_root_count })
}
