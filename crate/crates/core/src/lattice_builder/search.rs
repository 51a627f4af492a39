use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::HashMap;

use super::ideal::FracIdeal;
use super::order::{clear, row_times, MaximalOrder};
use super::primes::prime_pool;
use super::{different_ideal, LatticeError};
use crate::exact_linalg::lll::{default_delta, lll_reduce};
use crate::exact_linalg::{det_int, GramForm, IntMatrix, ShortVectors};
use crate::exec::Exec;
use crate::field_tower::{FElement, FieldTower, KElement};

/// Limits for [`find_unimodular_pair`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    /// Largest norm of a prime (or product of two primes) in the candidate pool.
    pub pool_norm: u64,
    /// Candidates examined before giving up; `O_K` counts as the first.
    pub max_candidates: usize,
    /// Exponent range `[−r, r]` for each cyclotomic unit; `0` disables unit adjustment.
    pub unit_range: u32,
    /// Cap on short vectors examined per candidate.
    pub max_generators: usize,
    pub exec: ExecChoice,
}

/// Serializable mirror of [`Exec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum ExecChoice {
    Sequential,
    #[default]
    Parallel,
}

impl From<ExecChoice> for Exec {
    fn from(e: ExecChoice) -> Exec {
        match e {
            ExecChoice::Sequential => Exec::Sequential,
            ExecChoice::Parallel => Exec::Parallel,
        }
    }
}

impl From<Exec> for ExecChoice {
    fn from(e: Exec) -> ExecChoice {
        match e {
            Exec::Sequential => ExecChoice::Sequential,
            Exec::Parallel => ExecChoice::Parallel,
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { pool_norm: 200, max_candidates: 64, unit_range: 3, max_generators: 20_000, exec: ExecChoice::Parallel }
    }
}

/// What was tried when no pair was found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchDiagnostics {
    pub pool_size: usize,
    pub candidates_tried: usize,
    pub generators_found: usize,
    pub unit_adjustments_tried: usize,
    pub budget: SearchBudget,
}

impl std::fmt::Display for SearchDiagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} of {} candidate ideals tried, {} generators found, {} unit adjustments tried",
            self.candidates_tried, self.pool_size, self.generators_found, self.unit_adjustments_tried
        )
    }
}

/// How a pair was found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchLog {
    pub candidate: String,
    pub candidate_index: usize,
    pub candidate_norm: String,
    pub candidates_tried: usize,
    pub generators_found: usize,
    pub unit_adjustments_tried: usize,
    /// Exponent of each cyclotomic unit in `d = ±g·∏u_a^{e_a}`.
    pub unit_exponents: Vec<i32>,
    pub enumeration_bound: String,
    pub budget: SearchBudget,
}

/// An ideal `A` and totally positive `d ∈ F` with `(d)·A·Ā·D = O_K`.
#[derive(Clone, Debug)]
pub struct UnimodularPair {
    pub ideal: FracIdeal,
    pub d: FElement,
    pub log: SearchLog,
}

/// The real cyclotomic units `ζ^{(1−a)(p+1)/2}(1 + ζ + … + ζ^{a−1})`, `2 ≤ a ≤ (p−1)/2`.
pub fn cyclotomic_units(t: &FieldTower) -> Vec<FElement> {
    let p = t.p() as i64;
    (2..=(p - 1) / 2)
        .map(|a| {
            let mut s = t.zero();
            for j in 0..a {
                s = t.add(&s, &t.zeta_pow(j));
            }
            let u = t.mul(&t.zeta_pow((1 - a) * (p + 1) / 2), &s);
            FElement::new(t, u).expect("real cyclotomic unit")
        })
        .collect()
}

/// Exact check of `(d)·A·Ā·D = O_K`.
pub fn satisfies_criterion(order: &MaximalOrder, ideal: &FracIdeal, d: &KElement) -> Result<bool, LatticeError> {
    let diff = different_ideal(order)?;
    let b = ideal.mul(&ideal.conj(order)?, order)?.mul(&diff, order)?;
    let dd = FracIdeal::principal(order, &order.from_k(d))?;
    Ok(dd.mul(&b, order)? == FracIdeal::unit(order))
}

struct Candidate {
    label: String,
    ideal: FracIdeal,
}

struct Context<'a> {
    order: &'a MaximalOrder,
    tower: &'a FieldTower,
    diff: FracIdeal,
    units: Vec<(KElement, Vec<i8>)>,
    budget: &'a SearchBudget,
}

struct Found {
    d: FElement,
    generators: usize,
    adjustments: usize,
    exponents: Vec<i32>,
    bound: BigRational,
}

struct Missed {
    generators: usize,
    adjustments: usize,
}

impl Context<'_> {
    fn try_candidate(&self, a: &FracIdeal) -> Result<Result<Found, Missed>, LatticeError> {
        let o = self.order;
        let t = self.tower;
        let b = a.mul(&a.conj(o)?, o)?.mul(&self.diff, o)?;
        let c = b.inverse(o)?;
        let fixed = c.fixed_sublattice(o);
        let (s, _) = clear(&fixed.iter().flatten().cloned().collect::<Vec<_>>());
        let rows: Vec<Vec<BigInt>> = fixed
            .iter()
            .map(|r| r.iter().map(|x| (x * BigRational::from_integer(s.clone())).to_integer()).collect())
            .collect();
        let m = rows.len();
        let h = o.hermitian_form();
        let gram = IntMatrix::from_rows(
            (0..m).map(|i| (0..m).map(|j| row_times(&rows[i], h).iter().zip(&rows[j]).map(|(x, y)| x * y).sum()).collect()).collect(),
        );
        let red = lll_reduce(&GramForm::from_int(&gram)?, &default_delta())?;
        let tr = red.transform.to_rows();
        // reduced basis: column k of the transform gives its coordinates
        let basis: Vec<Vec<BigInt>> = (0..m)
            .map(|k| {
                let mut v = vec![BigInt::zero(); o.degree()];
                for (i, row) in rows.iter().enumerate() {
                    let coef = &tr[i][k];
                    if !coef.is_zero() {
                        for (vi, ri) in v.iter_mut().zip(row) {
                            *vi += coef * ri;
                        }
                    }
                }
                v
            })
            .collect();
        let red_gram = red.gram.matrix().to_int().expect("integral Gram");
        let sv = ShortVectors::new(&GramForm::from_int(&red_gram)?)?;

        // scaled target: C' = s·C, |N_K(g')| = N(C)·s^{deg}
        let deg = o.degree() as u32;
        let target = c.norm() * BigRational::from_integer(s.pow(deg));
        debug_assert!(target.is_integer());
        let target = target.to_integer();
        let ln_nf = target.to_f64().map(f64::ln).unwrap_or_else(|| big_ln(&target)) / 2.0;
        let emb: Vec<Vec<f64>> = basis
            .iter()
            .map(|v| t.real_embeddings(&o.to_k_int(v), 64).iter().map(|b| b.re()).collect())
            .collect();
        let half = (m as f64).max(1.0);
        let am_gm = 2.0 * half * (2.0 * ln_nf / half).exp();
        let mut bound_f = am_gm * 1.25 + 1.0;
        let mut generators = 0usize;
        let mut adjustments = 0usize;
        let mut seen = 0usize;
        let units = self.unit_table();
        let mut prev: i128 = 0;
        for _round in 0..12 {
            let bound = BigRational::from_integer(BigInt::from(bound_f.ceil() as i128));
            let cur = sv.scaled_bound(&bound)?;
            // only the shell added by this round
            let parts = sv.fold(&bound, self.budget.exec.into(), Vec::new, |acc: &mut Vec<Vec<i64>>, h| {
                if h.norm_scaled > prev {
                    acc.push(h.x.to_vec());
                }
            })?;
            let mut vecs: Vec<Vec<i64>> = parts.into_iter().flatten().collect();
            vecs.sort_unstable();
            prev = cur;
            let fresh = vecs.len();
            for y in &vecs {
                let vals: Vec<f64> = (0..emb[0].len()).map(|j| y.iter().zip(&emb).map(|(&c, e)| c as f64 * e[j]).sum()).collect();
                let ln_n: f64 = vals.iter().map(|v| v.abs().ln()).sum();
                if (ln_n - ln_nf).abs() > 1e-6 * ln_nf.abs().max(1.0) {
                    continue;
                }
                generators += 1;
                let gsigns: Vec<i8> = vals.iter().map(|v| if *v > 0.0 { 1 } else { -1 }).collect();
                let neg: Vec<i8> = gsigns.iter().map(|x| -x).collect();
                for (key, sign) in [(&gsigns, BigRational::one()), (&neg, -BigRational::one())] {
                    let Some((exps, u)) = units.get(key) else { continue };
                    adjustments += 1;
                    let g: Vec<BigInt> =
                        (0..o.degree()).map(|i| y.iter().zip(&basis).map(|(&c, b)| BigInt::from(c) * &b[i]).sum()).collect();
                    if det_int(&o.mult_matrix(&g))?.abs() != target {
                        continue;
                    }
                    let scale = sign / BigRational::from_integer(s.clone());
                    let d = t.scale(&t.mul(&o.to_k_int(&g), u), &scale);
                    let Some(df) = FElement::new(t, d) else { continue };
                    if !t.is_totally_positive(&df) {
                        continue;
                    }
                    let dd = FracIdeal::principal(o, &o.from_k(df.as_k()))?;
                    if dd.mul(&b, o)? == FracIdeal::unit(o) {
                        return Ok(Ok(Found { d: df, generators, adjustments, exponents: exps.clone(), bound }));
                    }
                }
            }
            seen += fresh;
            if seen >= self.budget.max_generators {
                break;
            }
            bound_f *= 2.0;
        }
        Ok(Err(Missed { generators, adjustments }))
    }

    /// Sign pattern under the real embeddings ↦ `(exponents, ∏u_a^{e_a})`, first product in
    /// mask order. Exponents are reduced to `{0, 1}`: only signs matter once `g` ranges over
    /// the short generators, which already absorb small unit factors.
    fn unit_table(&self) -> HashMap<Vec<i8>, (Vec<i32>, KElement)> {
        let t = self.tower;
        let k = if self.budget.unit_range == 0 { 0 } else { self.units.len() };
        let mut out = HashMap::new();
        for mask in 0u32..(1 << k) {
            let mut u = t.one();
            let mut signs = vec![1i8; t.half_degree()];
            let mut exps = vec![0i32; self.units.len()];
            for (i, (ui, si)) in self.units.iter().enumerate().take(k) {
                if mask >> i & 1 == 1 {
                    u = t.mul(&u, ui);
                    exps[i] = 1;
                    for (a, b) in signs.iter_mut().zip(si) {
                        *a *= b;
                    }
                }
            }
            out.entry(signs).or_insert((exps, u));
        }
        out
    }
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let head = (x >> shift as usize).to_f64().unwrap_or(1.0);
    head.ln() + shift as f64 * std::f64::consts::LN_2
}

fn candidate_pool(order: &MaximalOrder, budget: &SearchBudget) -> Result<Vec<Candidate>, LatticeError> {
    let primes = prime_pool(order, budget.pool_norm)?;
    let mut cands: Vec<(BigInt, usize, Candidate)> =
        vec![(BigInt::one(), 0, Candidate { label: "O_K".into(), ideal: FracIdeal::unit(order) })];
    let limit = BigInt::from(budget.pool_norm);
    for p in &primes {
        cands.push((p.norm(), cands.len(), Candidate { label: format!("P({},{})", p.q, p.index), ideal: p.ideal.clone() }));
    }
    for (i, p) in primes.iter().enumerate() {
        for r in &primes[i..] {
            let nrm = p.norm() * r.norm();
            if nrm > limit {
                continue;
            }
            let ideal = p.ideal.mul(&r.ideal, order)?;
            cands.push((nrm, cands.len(), Candidate { label: format!("P({},{})*P({},{})", p.q, p.index, r.q, r.index), ideal }));
        }
    }
    cands.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(cands.into_iter().map(|c| c.2).collect())
}

/// Searches the candidate pool in order and returns the first verified pair.
pub fn find_unimodular_pair(tower: &FieldTower, budget: &SearchBudget) -> Result<UnimodularPair, LatticeError> {
    let order = MaximalOrder::new(tower)?;
    find_unimodular_pair_with(&order, budget)
}

pub fn find_unimodular_pair_with(order: &MaximalOrder, budget: &SearchBudget) -> Result<UnimodularPair, LatticeError> {
    let tower = order.tower();
    let pool = if budget.max_candidates == 0 { Vec::new() } else { candidate_pool(order, budget)? };
    let pool_size = pool.len();
    let units = cyclotomic_units(tower)
        .into_iter()
        .map(|u| {
            let signs = tower.certified_real_signs(u.as_k()).expect("units are nonzero");
            (u.into_k(), signs)
        })
        .collect();
    let ctx = Context { order, tower, diff: different_ideal(order)?, units, budget };
    let exec: Exec = budget.exec.into();
    let chunk = match exec.effective() {
        Exec::Sequential => 1,
        Exec::Parallel => 4,
    };
    let mut generators = 0;
    let mut adjustments = 0;
    let mut tried = 0;
    let take = pool.len().min(budget.max_candidates);
    let cands: Vec<(usize, &Candidate)> = pool.iter().take(take).enumerate().collect();
    for group in cands.chunks(chunk) {
        let results = exec.map_ordered(group.to_vec(), |(i, c)| (i, ctx.try_candidate(&c.ideal)));
        for (i, r) in results {
            tried += 1;
            match r? {
                Ok(f) => {
                    let cand = &pool[i];
                    let log = SearchLog {
                        candidate: cand.label.clone(),
                        candidate_index: i,
                        candidate_norm: cand.ideal.norm().to_string(),
                        candidates_tried: tried,
                        generators_found: generators + f.generators,
                        unit_adjustments_tried: adjustments + f.adjustments,
                        unit_exponents: f.exponents,
                        enumeration_bound: f.bound.to_string(),
                        budget: budget.clone(),
                    };
                    return Ok(UnimodularPair { ideal: cand.ideal.clone(), d: f.d, log });
                }
                Err(m) => {
                    generators += m.generators;
                    adjustments += m.adjustments;
                }
            }
        }
    }
    Err(LatticeError::SearchExhausted(Box::new(SearchDiagnostics {
        pool_size,
        candidates_tried: tried,
        generators_found: generators,
        unit_adjustments_tried: adjustments,
        budget: budget.clone(),
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::build_tower;

    #[test]
    fn units_are_units() {
        let t = build_tower(1, 13).unwrap();
        let us = cyclotomic_units(&t);
        assert_eq!(us.len(), 5);
        for u in &us {
            assert_eq!(t.norm_f(u).abs(), BigRational::one());
        }
    }

    #[test]
    fn zero_budget_exhausts() {
        let t = build_tower(1, 5).unwrap();
        let budget = SearchBudget { max_candidates: 0, ..SearchBudget::default() };
        match find_unimodular_pair(&t, &budget) {
            Err(LatticeError::SearchExhausted(d)) => assert_eq!(d.candidates_tried, 0),
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn small_pairs_satisfy_criterion() {
        for ell in [1, 3] {
            let t = build_tower(ell, 5).unwrap();
            let o = MaximalOrder::new(&t).unwrap();
            let pair = find_unimodular_pair_with(&o, &SearchBudget::default()).unwrap();
            assert!(t.is_totally_positive_exact(&pair.d));
            assert!(satisfies_criterion(&o, &pair.ideal, pair.d.as_k()).unwrap());
        }
    }
}
