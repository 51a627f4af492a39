use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::{dot, HermitianLattice, ThetaError};
use crate::exact_linalg::{enumerate_coset, LinearConstraint};
use crate::exec::Exec;
use crate::field_tower::{LElement, QuadraticField};

/// A conjugate-symmetric `n×n` matrix over `L` with rational diagonal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HermMatrixL {
    entries: Vec<Vec<LElement>>,
}

impl HermMatrixL {
    /// From the diagonal and the strict upper triangle (row-major); the lower triangle is
    /// filled by conjugation.
    pub fn new(q: &QuadraticField, diag: &[BigRational], upper: &[LElement]) -> Self {
        let n = diag.len();
        assert_eq!(upper.len(), n * (n - 1) / 2);
        let mut e = vec![vec![LElement::zero(); n]; n];
        let mut k = 0;
        for i in 0..n {
            e[i][i] = LElement::rational(diag[i].clone());
            for j in (i + 1)..n {
                e[i][j] = upper[k].clone();
                e[j][i] = q.conj(&upper[k]);
                k += 1;
            }
        }
        HermMatrixL { entries: e }
    }

    pub fn zero(n: usize) -> Self {
        HermMatrixL { entries: vec![vec![LElement::zero(); n]; n] }
    }

    pub fn from_entries(entries: Vec<Vec<LElement>>) -> Self {
        HermMatrixL { entries }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<LElement>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(LElement::is_zero)
    }

    pub fn diag(&self) -> Vec<BigRational> {
        (0..self.n()).map(|i| self.entries[i][i].a.clone()).collect()
    }

    pub fn upper(&self) -> Vec<LElement> {
        let n = self.n();
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| self.entries[i][j].clone()).collect()
    }

    pub fn conj(&self, q: &QuadraticField) -> Self {
        HermMatrixL { entries: self.entries.iter().map(|r| r.iter().map(|x| q.conj(x)).collect()).collect() }
    }

    /// `conj(U)ᵀ·A·U`.
    pub fn transform(&self, q: &QuadraticField, u: &[Vec<LElement>]) -> Self {
        let n = self.n();
        let mut au = vec![vec![LElement::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    au[i][j] = au[i][j].add(&q.mul(&self.entries[i][k], &u[k][j]));
                }
            }
        }
        let mut out = vec![vec![LElement::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[i][j] = out[i][j].add(&q.mul(&q.conj(&u[k][i]), &au[k][j]));
                }
            }
        }
        HermMatrixL { entries: out }
    }
}

/// `R_A` for every `A` with diagonal entries in `[0, diag_bound]`; absent keys are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepNumberTable {
    pub genus: usize,
    pub diag_bound: u64,
    pub counts: BTreeMap<HermMatrixL, u64>,
}

impl RepNumberTable {
    pub fn get(&self, a: &HermMatrixL) -> u64 {
        self.counts.get(a).copied().unwrap_or(0)
    }

    /// Whether every diagonal entry of `a` is within the computed range.
    pub fn covers(&self, a: &HermMatrixL) -> bool {
        let top = BigRational::from_integer(self.diag_bound.into());
        a.n() == self.genus && a.diag().iter().all(|d| d.is_integer() && !d.is_negative() && *d <= top)
    }
}

/// Counts tuples `(x_1..x_n)` of vectors with `h(x_i, x_i) ≤ diag_bound`, keyed by their
/// Hermitian Gram matrix. Parallel over `x_1`; per-branch tables are merged in order.
pub fn rep_numbers(hl: &HermitianLattice, genus: usize, diag_bound: u64, exec: Exec) -> Result<RepNumberTable, ThetaError> {
    if genus == 0 {
        return Err(ThetaError::NotApplicable("genus must be at least 1".into()));
    }
    let sv = hl.short_vectors()?;
    let mut vecs = vec![vec![0i64; hl.dim()]];
    vecs.extend(sv.collect(&BigRational::from_integer((2 * diag_bound).into()), exec)?);
    let sh = hl.scaled();
    let lefts: Vec<(Vec<i64>, Vec<i64>)> = vecs.iter().map(|v| sh.left(v)).collect();
    // scaled keys: diagonal as b(x,x)/2, off-diagonal as (a, b)·den
    let diag: Vec<i64> = vecs.iter().zip(&lefts).map(|(v, l)| dot(&l.0, v)).collect();

    type Key = Vec<i64>;
    let count_from = |first: usize| -> BTreeMap<Key, u64> {
        let mut table: BTreeMap<Key, u64> = BTreeMap::new();
        let mut stack = vec![first];
        recurse(&mut stack, genus, vecs.len(), &mut |idx: &[usize]| {
            let mut key = Vec::with_capacity(genus * genus);
            for &i in idx {
                key.push(diag[i]);
            }
            for a in 0..idx.len() {
                for b in (a + 1)..idx.len() {
                    let (la, lb) = &lefts[idx[a]];
                    key.push(dot(la, &vecs[idx[b]]));
                    key.push(dot(lb, &vecs[idx[b]]));
                }
            }
            *table.entry(key).or_insert(0) += 1;
        });
        table
    };
    let parts = exec.map_ordered((0..vecs.len()).collect(), count_from);
    let mut merged: BTreeMap<Key, u64> = BTreeMap::new();
    for part in parts {
        for (k, c) in part {
            *merged.entry(k).or_insert(0) += c;
        }
    }
    let q = hl.quadratic();
    let den = BigInt::from(sh.den);
    let counts = merged
        .into_iter()
        .map(|(k, c)| {
            let diag: Vec<BigRational> = k[..genus].iter().map(|&v| BigRational::new(v.into(), den.clone())).collect();
            let upper: Vec<LElement> = k[genus..].chunks(2).map(|ab| sh.to_l(ab[0], ab[1])).collect();
            (HermMatrixL::new(q, &diag, &upper), c)
        })
        .collect();
    Ok(RepNumberTable { genus, diag_bound, counts })
}

fn recurse(stack: &mut Vec<usize>, genus: usize, len: usize, f: &mut impl FnMut(&[usize])) {
    if stack.len() == genus {
        f(stack);
        return;
    }
    for i in 0..len {
        stack.push(i);
        recurse(stack, genus, len, f);
        stack.pop();
    }
}

/// `R_A` for a single genus-2 `A` by constrained enumeration: `x_1` ranges over vectors of
/// norm `2a_11`, and `x_2` over the coset cut out by the two rational conditions
/// `h(x_1, x_2) = a_12`.
pub fn rep_number_coset(hl: &HermitianLattice, a: &HermMatrixL, exec: Exec) -> Result<u64, ThetaError> {
    if a.n() != 2 {
        return Err(ThetaError::NotApplicable("the coset route handles genus 2".into()));
    }
    let e = a.entries();
    let (a11, a22, a12) = (&e[0][0], &e[1][1], &e[0][1]);
    if !a11.is_rational() || !a22.is_rational() || !a11.a.is_integer() || !a22.a.is_integer() {
        return Ok(0);
    }
    let n11 = (&a11.a * BigRational::from_integer(2.into())).to_integer().to_i64().ok_or(ThetaError::Overflow)?;
    let n22 = (&a22.a * BigRational::from_integer(2.into())).to_integer().to_i64().ok_or(ThetaError::Overflow)?;
    if n11 < 0 || n22 < 0 {
        return Ok(0);
    }
    let dim = hl.dim();
    let mut firsts: Vec<Vec<i64>> = Vec::new();
    if n11 == 0 {
        firsts.push(vec![0; dim]);
    } else {
        let sv = hl.short_vectors()?;
        let all = sv.collect(&BigRational::from_integer(n11.into()), exec)?;
        firsts.extend(all.into_iter().filter(|x| hl.norm(x) == n11));
    }
    let sh = hl.scaled();
    let den = BigRational::from_integer(sh.den.into());
    let form = hl.form()?;
    let counts = exec.map_ordered(firsts, |x1| -> Result<u64, ThetaError> {
        let (la, lb) = sh.left(&x1);
        let zero_ok = a12.is_zero() && n22 == 0;
        if n22 == 0 {
            return Ok(u64::from(zero_ok));
        }
        let cons = vec![
            LinearConstraint { row: la.iter().map(|&v| BigInt::from(v)).collect(), target: &a12.a * &den },
            LinearConstraint { row: lb.iter().map(|&v| BigInt::from(v)).collect(), target: &a12.b * &den },
        ];
        let xs = enumerate_coset(&form, &BigRational::from_integer(n22.into()), &cons, Exec::Sequential)?;
        Ok(xs.iter().filter(|x| hl.norm(x) == n22).count() as u64)
    });
    counts.into_iter().sum()
}

/// Per-`A` residues of a table modulo `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub p: u64,
    pub genus: usize,
    pub diag_bound: u64,
    pub entries: Vec<CongruenceEntry>,
    pub zero_count: u64,
    pub verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceEntry {
    pub diag: Vec<String>,
    /// Strict upper triangle as `[a, b]` meaning `a + b·ω`.
    pub offdiag: Vec<[String; 2]>,
    pub count: u64,
    pub residue: u64,
}

/// Verdict: `R_0 = 1` and `p | R_A` for every other `A` in the table.
pub fn congruence_check(table: &RepNumberTable, p: u64) -> CongruenceReport {
    let zero = HermMatrixL::zero(table.genus);
    let zero_count = table.get(&zero);
    let entries: Vec<CongruenceEntry> = table
        .counts
        .iter()
        .map(|(a, &c)| CongruenceEntry {
            diag: a.diag().iter().map(|d| d.to_string()).collect(),
            offdiag: a.upper().iter().map(|x| [x.a.to_string(), x.b.to_string()]).collect(),
            count: c,
            residue: c % p,
        })
        .collect();
    let verdict = zero_count == 1 && table.counts.iter().all(|(a, &c)| a.is_zero() || c % p == 0);
    CongruenceReport { p, genus: table.genus, diag_bound: table.diag_bound, entries, zero_count, verdict }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub checked: usize,
    pub skipped: usize,
    pub failures: usize,
}

impl InvarianceReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// `R_A = R_{conj(U)ᵀ·A·U}` for every table entry whose image stays within the table's
/// diagonal bound; other entries are skipped and counted.
pub fn u_invariance_check(table: &RepNumberTable, q: &QuadraticField, samples: &[Vec<Vec<LElement>>]) -> InvarianceReport {
    let mut rep = InvarianceReport { checked: 0, skipped: 0, failures: 0 };
    for u in samples {
        for (a, &c) in &table.counts {
            let img = a.transform(q, u);
            if !table.covers(&img) {
                rep.skipped += 1;
                continue;
            }
            rep.checked += 1;
            if table.get(&img) != c {
                rep.failures += 1;
            }
        }
    }
    rep
}
