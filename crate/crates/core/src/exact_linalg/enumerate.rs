//! Fincke–Pohst enumeration of lattice vectors in an ellipsoid.
//!
//! The search tree is pruned with a floating-point Cholesky factor of the LLL-reduced
//! form, widened by a relative slack, and every leaf is accepted or rejected with an
//! exact integer evaluation of the form. Output is therefore exact; the float path only
//! decides which branches are explored.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::det;
use super::hnf::solve_integer;
use super::lll::{default_delta, lll_reduce};
use super::matrix::{GramForm, IntMatrix, RatMatrix};
use super::LinalgError;
use crate::exec::Exec;

const SLACK: f64 = 1e-9;
// top levels of the search tree used as independent partitions
const SPLIT_DEPTH: usize = 2;

/// Integer Gram plus its floating `LDLᵀ` data.
#[derive(Clone, Debug)]
struct Ellipsoid {
    n: usize,
    g: Vec<Vec<i128>>,
    r: Vec<f64>,
    mu: Vec<Vec<f64>>,
}

impl Ellipsoid {
    fn new(g: Vec<Vec<i128>>) -> Self {
        let n = g.len();
        let mut r = vec![0.0; n];
        let mut mu = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut v = g[i][i] as f64;
            for k in 0..i {
                v -= mu[k][i] * mu[k][i] * r[k];
            }
            r[i] = v;
            for j in i + 1..n {
                let mut w = g[i][j] as f64;
                for k in 0..i {
                    w -= mu[k][i] * mu[k][j] * r[k];
                }
                mu[i][j] = w / v;
            }
        }
        Ellipsoid { n, g, r, mu }
    }

    fn center_at(&self, i: usize, y: &[i64], c: &[f64]) -> f64 {
        let mut s = c[i];
        for j in i + 1..self.n {
            s -= self.mu[i][j] * (y[j] as f64 - c[j]);
        }
        s
    }

    fn range_at(&self, i: usize, center: f64, partial: f64, bound: f64) -> Option<(i64, i64)> {
        let rem = bound - partial;
        if rem < 0.0 {
            return None;
        }
        let rad = (rem / self.r[i]).sqrt() * (1.0 + SLACK) + SLACK;
        let lo = (center - rad).ceil() as i64;
        let hi = (center + rad).floor() as i64;
        (lo <= hi).then_some((lo, hi))
    }

    /// Feasible assignments of the top `depth` coordinates, in increasing lexicographic
    /// order of `(y[n-1], y[n-2], …)`.
    fn prefixes(&self, c: &[f64], bound: f64, depth: usize) -> Vec<(Vec<i64>, f64)> {
        let depth = depth.min(self.n);
        let mut out = Vec::new();
        let mut y = vec![0i64; self.n];
        self.prefix_rec(self.n, depth, c, bound, 0.0, &mut y, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn prefix_rec(&self, level: usize, depth: usize, c: &[f64], bound: f64, partial: f64, y: &mut [i64], out: &mut Vec<(Vec<i64>, f64)>) {
        if self.n - level == depth {
            out.push((y[level..].to_vec(), partial));
            return;
        }
        let i = level - 1;
        let center = self.center_at(i, y, c);
        let Some((lo, hi)) = self.range_at(i, center, partial, bound) else { return };
        for v in lo..=hi {
            let d = v as f64 - center;
            let np = partial + self.r[i] * d * d;
            if np <= bound {
                y[i] = v;
                self.prefix_rec(level - 1, depth, c, bound, np, y, out);
            }
        }
        y[i] = 0;
    }

    /// Visits every `y` below the float bound whose top coordinates equal `prefix`.
    fn visit(&self, c: &[f64], bound: f64, prefix: &[i64], partial: f64, f: &mut dyn FnMut(&[i64])) {
        let mut y = vec![0i64; self.n];
        let start = self.n - prefix.len();
        y[start..].copy_from_slice(prefix);
        self.visit_rec(start, c, bound, partial, &mut y, f);
    }

    fn visit_rec(&self, level: usize, c: &[f64], bound: f64, partial: f64, y: &mut [i64], f: &mut dyn FnMut(&[i64])) {
        if level == 0 {
            f(y);
            return;
        }
        let i = level - 1;
        let center = self.center_at(i, y, c);
        let Some((lo, hi)) = self.range_at(i, center, partial, bound) else { return };
        for v in lo..=hi {
            let d = v as f64 - center;
            let np = partial + self.r[i] * d * d;
            if np <= bound {
                y[i] = v;
                self.visit_rec(level - 1, c, bound, np, y, f);
            }
        }
        y[i] = 0;
    }

    fn norm(&self, y: &[i64]) -> i128 {
        let mut acc = 0i128;
        for i in 0..self.n {
            if y[i] == 0 {
                continue;
            }
            let mut row = 0i128;
            for j in 0..self.n {
                row += self.g[i][j] * y[j] as i128;
            }
            acc += row * y[i] as i128;
        }
        acc
    }
}

fn float_bound(b: f64) -> f64 {
    b * (1.0 + SLACK) + SLACK
}

fn to_i128_rows(m: &IntMatrix) -> Result<Vec<Vec<i128>>, LinalgError> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|a| a.to_i128().ok_or(LinalgError::Overflow)).collect())
        .collect()
}

/// Short-vector enumerator for a fixed positive definite form. Construction LLL-reduces
/// the form once; every query reuses the reduced basis.
#[derive(Clone, Debug)]
pub struct ShortVectors {
    form: GramForm,
    scale: BigInt,
    ell: Ellipsoid,
    // x = t·y
    t: Vec<Vec<i64>>,
}

/// One enumerated vector in the input coordinates together with its scaled norm
/// (`norm_scaled / scale` is the exact value of the form).
pub struct Hit<'a> {
    pub x: &'a [i64],
    pub norm_scaled: i128,
}

impl ShortVectors {
    pub fn new(q: &GramForm) -> Result<Self, LinalgError> {
        if !q.is_positive_definite() {
            return Err(LinalgError::NotPositiveDefinite);
        }
        let red = lll_reduce(q, &default_delta())?;
        let (scale, gi) = red.gram.matrix().clear_denominators();
        let t = red.transform.to_i64_rows().ok_or(LinalgError::Overflow)?;
        Ok(ShortVectors { form: q.clone(), scale, ell: Ellipsoid::new(to_i128_rows(&gi)?), t })
    }

    pub fn dim(&self) -> usize {
        self.ell.n
    }

    pub fn form(&self) -> &GramForm {
        &self.form
    }

    /// Common denominator of the form; norms are reported multiplied by it.
    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    pub fn scaled_bound(&self, bound: &BigRational) -> Result<i128, LinalgError> {
        (bound * BigRational::from_integer(self.scale.clone())).floor().to_integer().to_i128().ok_or(LinalgError::Overflow)
    }

    fn to_input(&self, y: &[i64], x: &mut [i64]) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = self.t[i].iter().zip(y).map(|(a, b)| a * b).sum();
        }
    }

    /// Folds every nonzero `x` with `xᵀqx ≤ bound` into one accumulator per partition of
    /// the search tree. Accumulators come back in partition order.
    pub fn fold<A, I, F>(&self, bound: &BigRational, exec: Exec, init: I, f: F) -> Result<Vec<A>, LinalgError>
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&mut A, Hit<'_>) + Sync + Send,
    {
        if bound.is_negative() {
            return Ok(Vec::new());
        }
        let b_int = self.scaled_bound(bound)?;
        let bf = float_bound(b_int as f64);
        let zero_c = vec![0.0; self.dim()];
        let parts = self.ell.prefixes(&zero_c, bf, SPLIT_DEPTH);
        Ok(exec.map_ordered(parts, |(prefix, partial)| {
            let mut acc = init();
            let mut x = vec![0i64; self.dim()];
            self.ell.visit(&zero_c, bf, &prefix, partial, &mut |y| {
                if y.iter().all(|&v| v == 0) {
                    return;
                }
                let nrm = self.ell.norm(y);
                if nrm <= b_int {
                    self.to_input(y, &mut x);
                    f(&mut acc, Hit { x: &x, norm_scaled: nrm });
                }
            });
            acc
        }))
    }

    /// All nonzero vectors with `xᵀqx ≤ bound`, sorted lexicographically.
    pub fn collect(&self, bound: &BigRational, exec: Exec) -> Result<Vec<Vec<i64>>, LinalgError> {
        let parts = self.fold(bound, exec, Vec::new, |acc: &mut Vec<Vec<i64>>, h| acc.push(h.x.to_vec()))?;
        let mut all: Vec<Vec<i64>> = parts.into_iter().flatten().collect();
        all.sort_unstable();
        Ok(all)
    }

    /// `counts[k]` = number of nonzero vectors with scaled norm exactly `k`, for
    /// `k ≤ max_scaled`.
    pub fn count_by_norm(&self, max_scaled: i128, exec: Exec) -> Result<Vec<u64>, LinalgError> {
        let len = usize::try_from(max_scaled.max(-1) + 1).map_err(|_| LinalgError::Overflow)?;
        let bound = BigRational::new(BigInt::from(max_scaled), self.scale.clone());
        let parts = self.fold(&bound, exec, || vec![0u64; len], |acc: &mut Vec<u64>, h| acc[h.norm_scaled as usize] += 1)?;
        let mut out = vec![0u64; len];
        for p in parts {
            for (o, c) in out.iter_mut().zip(p) {
                *o += c;
            }
        }
        Ok(out)
    }

    /// Smallest nonzero norm (scaled), found by enumerating at a growing bound.
    pub fn minimum_scaled(&self) -> Result<i128, LinalgError> {
        let mut b = (0..self.dim()).map(|i| self.ell.g[i][i]).min().unwrap_or(0);
        loop {
            let bound = BigRational::new(BigInt::from(b), self.scale.clone());
            let parts = self.fold(&bound, Exec::Sequential, || i128::MAX, |acc: &mut i128, h| *acc = (*acc).min(h.norm_scaled))?;
            if let Some(m) = parts.into_iter().min().filter(|&m| m != i128::MAX) {
                return Ok(m);
            }
            b = b.checked_mul(2).ok_or(LinalgError::Overflow)?.max(1);
        }
    }
}

/// Every nonzero integer `x` with `xᵀqx ≤ bound`, each exactly once, sorted
/// lexicographically.
pub fn enumerate_short(q: &GramForm, bound: &BigRational, exec: Exec) -> Result<Vec<Vec<i64>>, LinalgError> {
    ShortVectors::new(q)?.collect(bound, exec)
}

/// A linear condition `row·x = target` on integer coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub row: Vec<BigInt>,
    pub target: BigRational,
}

/// Nonzero `x` with `xᵀqx ≤ bound` satisfying every constraint exactly.
///
/// The constraints are solved over `Z` first (`x = x₀ + K·w`); the residual coset is then
/// enumerated around its own center instead of filtering the full ball.
pub fn enumerate_coset(
    q: &GramForm,
    bound: &BigRational,
    constraints: &[LinearConstraint],
    exec: Exec,
) -> Result<Vec<Vec<i64>>, LinalgError> {
    if constraints.is_empty() {
        return enumerate_short(q, bound, exec);
    }
    if !q.is_positive_definite() {
        return Err(LinalgError::NotPositiveDefinite);
    }
    let n = q.dim();
    if bound.is_negative() {
        return Ok(Vec::new());
    }
    let c = IntMatrix::from_rows(constraints.iter().map(|k| {
        assert_eq!(k.row.len(), n, "constraint length");
        k.row.clone()
    }).collect());
    let t: Vec<BigRational> = constraints.iter().map(|k| k.target.clone()).collect();
    let Some((x0, ker)) = solve_integer(&c, &t) else { return Ok(Vec::new()) };
    let accept = |x: &[BigInt]| !x.iter().all(Zero::is_zero) && q.eval_int(x) <= *bound;
    let to_i64 = |x: &[BigInt]| x.iter().map(|v| v.to_i64().ok_or(LinalgError::Overflow)).collect::<Result<Vec<_>, _>>();
    if ker.cols() == 0 {
        return if accept(&x0) { Ok(vec![to_i64(&x0)?]) } else { Ok(Vec::new()) };
    }
    // reduce the kernel lattice under the restricted form
    let sub = q.transform(&ker);
    let red = lll_reduce(&sub, &default_delta())?;
    let basis = ker.mul(&red.transform);
    let qr = red.gram.matrix();
    let x0r: Vec<BigRational> = x0.iter().map(|v| BigRational::from_integer(v.clone())).collect();
    // linear term l = Bᵀ Q x0, center c = −Q''⁻¹ l
    let qx0 = q.matrix().mul_vec(&x0r);
    let lin = basis.to_rat().transpose().mul_vec(&qx0);
    let center: Vec<BigRational> = det::solve(qr, &lin)?.into_iter().map(|v| -v).collect();
    let qc = GramForm::new(qr.clone())?;
    let c_norm = quad_rat(qr, &center);
    let rem = bound - q.eval_int(&x0) + c_norm;
    if rem.is_negative() {
        return Ok(Vec::new());
    }
    let (scale, gi) = qc.matrix().clear_denominators();
    let ell = Ellipsoid::new(to_i128_rows(&gi)?);
    let scale_q = BigRational::from_integer(scale);
    let bf = float_bound(rat_f64(&(&rem * &scale_q)));
    let cf: Vec<f64> = center.iter().map(rat_f64).collect();
    let parts = ell.prefixes(&cf, bf, SPLIT_DEPTH);
    let basis_rows = basis.to_rows();
    let results = exec.map_ordered(parts, |(prefix, partial)| {
        let mut out = Vec::new();
        let mut x = vec![BigInt::zero(); n];
        ell.visit(&cf, bf, &prefix, partial, &mut |w| {
            for i in 0..n {
                x[i] = &x0[i] + basis_rows[i].iter().zip(w).map(|(a, b)| a * b).sum::<BigInt>();
            }
            if accept(&x) {
                out.push(x.clone());
            }
        });
        out
    });
    let mut all = Vec::new();
    for v in results.into_iter().flatten() {
        all.push(to_i64(&v)?);
    }
    all.sort_unstable();
    Ok(all)
}

fn quad_rat(g: &RatMatrix, v: &[BigRational]) -> BigRational {
    let gv = g.mul_vec(v);
    gv.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
}

pub(crate) fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
